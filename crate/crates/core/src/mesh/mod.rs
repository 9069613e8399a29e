//! Meshes of the physical domain and of the dilated truncation domains.
//!
//! A [`Mesh`] stores every vertex, including Dirichlet ones; unknowns are the
//! non-Dirichlet vertices, numbered in vertex order by [`Mesh::dof_map`].

mod disk;
mod interval;
pub mod io;
mod nesting;

pub use disk::{coarse_disk_mesh, coarse_unit_disk, DEFAULT_HALF_WIDTH};
pub use interval::{graded_extension_1d, interval_mesh, uniform_extension_1d, uniform_interval_mesh};
pub use nesting::NestingMap;

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Vertices closer to the origin than this are never treated as lying on a circle.
pub(crate) const RADIAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cells {
    Segments(Vec<[usize; 2]>),
    Quads(Vec<[usize; 4]>),
}

impl Cells {
    pub fn len(&self) -> usize {
        match self {
            Cells::Segments(c) => c.len(),
            Cells::Quads(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Vertex indices of cell `i`.
    pub fn vertices(&self, i: usize) -> &[usize] {
        match self {
            Cells::Segments(c) => &c[i],
            Cells::Quads(c) => &c[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    /// 1D meshes store `[x, 0]`.
    pub vertices: Vec<[f64; 2]>,
    pub cells: Cells,
    pub dirichlet: Vec<bool>,
    /// Per cell: true for cells of the physical domain.
    pub in_domain: Vec<bool>,
    dofs: Vec<Option<usize>>,
    n_dofs: usize,
}

/// Shape statistics of a mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshQuality {
    pub min_size: f64,
    pub max_size: f64,
    /// Largest ratio of longest to shortest edge over all cells.
    pub max_aspect: f64,
}

impl Mesh {
    pub fn new(vertices: Vec<[f64; 2]>, cells: Cells, dirichlet: Vec<bool>, in_domain: Vec<bool>) -> Result<Self> {
        if dirichlet.len() != vertices.len() {
            return Err(Error::Mesh("dirichlet flags do not match vertex count".into()));
        }
        if in_domain.len() != cells.len() {
            return Err(Error::Mesh("domain flags do not match cell count".into()));
        }
        let mut n_dofs = 0;
        let dofs = dirichlet
            .iter()
            .map(|&d| {
                (!d).then(|| {
                    n_dofs += 1;
                    n_dofs - 1
                })
            })
            .collect();
        let mesh = Self { vertices, cells, dirichlet, in_domain, dofs, n_dofs };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        match self.cells {
            Cells::Segments(_) => 1,
            Cells::Quads(_) => 2,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Number of unknowns (non-Dirichlet vertices).
    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// Unknown index of vertex `v`, if it is not Dirichlet.
    pub fn dof(&self, v: usize) -> Option<usize> {
        self.dofs[v]
    }

    pub fn dof_map(&self) -> &[Option<usize>] {
        &self.dofs
    }

    /// Vertex index of every unknown.
    pub fn dof_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&v| !self.dirichlet[v]).collect()
    }

    fn validate(&self) -> Result<()> {
        match &self.cells {
            Cells::Segments(cells) => {
                for (i, c) in cells.iter().enumerate() {
                    if !(self.vertices[c[1]][0] > self.vertices[c[0]][0]) {
                        return Err(Error::Mesh(format!("segment {i} has non-positive length")));
                    }
                }
            }
            Cells::Quads(cells) => {
                for (i, c) in cells.iter().enumerate() {
                    for k in 0..4 {
                        let p = self.vertices[c[k]];
                        let a = self.vertices[c[(k + 1) % 4]];
                        let b = self.vertices[c[(k + 3) % 4]];
                        let cross = (a[0] - p[0]) * (b[1] - p[1]) - (a[1] - p[1]) * (b[0] - p[0]);
                        if !(cross > 0.0) {
                            return Err(Error::Mesh(format!("quadrilateral {i} is inverted or degenerate at corner {k}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Sub-mesh made of the cells flagged as physical domain. Vertices on the
    /// domain boundary become Dirichlet.
    pub fn domain_part(&self) -> Result<Mesh> {
        let mut remap = vec![usize::MAX; self.n_vertices()];
        let mut vertices = Vec::new();
        let mut use_count = vec![0usize; self.n_vertices()];
        let keep: Vec<usize> = (0..self.n_cells()).filter(|&i| self.in_domain[i]).collect();
        for &i in &keep {
            for &v in self.cells.vertices(i) {
                if remap[v] == usize::MAX {
                    remap[v] = vertices.len();
                    vertices.push(self.vertices[v]);
                }
                use_count[v] += 1;
            }
        }
        let mut dirichlet = vec![false; vertices.len()];
        for i in 0..self.n_cells() {
            if !self.in_domain[i] {
                for &v in self.cells.vertices(i) {
                    if remap[v] != usize::MAX {
                        dirichlet[remap[v]] = true;
                    }
                }
            }
        }
        for v in 0..self.n_vertices() {
            if remap[v] != usize::MAX && self.dirichlet[v] {
                dirichlet[remap[v]] = true;
            }
        }
        let cells = match &self.cells {
            Cells::Segments(c) => Cells::Segments(keep.iter().map(|&i| c[i].map(|v| remap[v])).collect()),
            Cells::Quads(c) => Cells::Quads(keep.iter().map(|&i| c[i].map(|v| remap[v])).collect()),
        };
        Mesh::new(vertices, cells, dirichlet, vec![true; keep.len()])
    }

    pub fn quality(&self) -> MeshQuality {
        let mut q = MeshQuality { min_size: f64::INFINITY, max_size: 0.0, max_aspect: 1.0 };
        let dist = |a: usize, b: usize| {
            let (p, r) = (self.vertices[a], self.vertices[b]);
            ((p[0] - r[0]).powi(2) + (p[1] - r[1]).powi(2)).sqrt()
        };
        for i in 0..self.n_cells() {
            let c = self.cells.vertices(i);
            let n = c.len();
            let edges: Vec<f64> = (0..n).map(|k| dist(c[k], c[(k + 1) % n])).collect();
            let lo = edges.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = edges.iter().cloned().fold(0.0, f64::max);
            q.min_size = q.min_size.min(lo);
            q.max_size = q.max_size.max(hi);
            q.max_aspect = q.max_aspect.max(hi / lo);
        }
        q
    }

    /// Uniform refinement. 1D cells are bisected (extension cells at the
    /// geometric mean); quads are split in four through edge midpoints, which
    /// are taken in `(ln r, theta)` for edges between vertices outside the open
    /// unit disk.
    pub fn refine(&self) -> Result<Mesh> {
        match &self.cells {
            Cells::Segments(cells) => interval::refine(self, cells),
            Cells::Quads(cells) => disk::refine(self, cells),
        }
    }

    pub fn refine_times(&self, times: usize) -> Result<Mesh> {
        let mut m = self.clone();
        for _ in 0..times {
            m = m.refine()?;
        }
        Ok(m)
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn edge_multiplicity(cells: &[[usize; 4]]) -> HashMap<(usize, usize), u8> {
    let mut count = HashMap::new();
    for c in cells {
        for k in 0..4 {
            *count.entry(edge_key(c[k], c[(k + 1) % 4])).or_insert(0) += 1;
        }
    }
    count
}
