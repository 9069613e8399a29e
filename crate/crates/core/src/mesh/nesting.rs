use std::collections::HashMap;

use super::Mesh;
use crate::error::{Error, Result};

const MATCH_TOL: f64 = 1e-12;
const BUCKET: f64 = 1e-6;

/// Maps the unknowns of a domain mesh to the unknowns of an extension mesh
/// that contains it cell for cell.
#[derive(Debug, Clone, PartialEq)]
pub struct NestingMap {
    pub source_dofs: usize,
    pub target_dofs: usize,
    /// `index_map[i]` is the target unknown of source unknown `i`.
    pub index_map: Vec<usize>,
}

fn bucket(p: [f64; 2]) -> (i64, i64) {
    ((p[0] / BUCKET).floor() as i64, (p[1] / BUCKET).floor() as i64)
}

impl NestingMap {
    /// Matches every source unknown to a target unknown with the same
    /// coordinates (within `1e-12`). Fails if any source unknown is missing.
    pub fn build(source: &Mesh, target: &Mesh) -> Result<Self> {
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for v in 0..target.n_vertices() {
            grid.entry(bucket(target.vertices[v])).or_default().push(v);
        }
        let mut index_map = Vec::with_capacity(source.n_dofs());
        for v in source.dof_vertices() {
            let p = source.vertices[v];
            let (bx, by) = bucket(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for &w in grid.get(&(bx + dx, by + dy)).into_iter().flatten() {
                        let q = target.vertices[w];
                        if (p[0] - q[0]).abs() <= MATCH_TOL && (p[1] - q[1]).abs() <= MATCH_TOL {
                            found = Some(w);
                            break 'search;
                        }
                    }
                }
            }
            let w = found.ok_or_else(|| Error::Mesh(format!("domain vertex {v} at {p:?} has no match in the extension mesh")))?;
            let dof = target.dof(w).ok_or_else(|| Error::Mesh(format!("domain vertex {v} matches a Dirichlet vertex")))?;
            index_map.push(dof);
        }
        Ok(Self { source_dofs: source.n_dofs(), target_dofs: target.n_dofs(), index_map })
    }

    /// Extension by zero.
    pub fn extend(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.target_dofs];
        for (&t, &x) in self.index_map.iter().zip(v) {
            out[t] = x;
        }
        out
    }

    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        self.index_map.iter().map(|&t| v[t]).collect()
    }
}
