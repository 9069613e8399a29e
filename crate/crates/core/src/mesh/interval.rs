use super::{Cells, Mesh};
use crate::error::{Error, Result};

/// Uniform mesh of `(-1, 1)` with `n` cells.
pub fn interval_mesh(n: usize) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::Mesh(format!("need at least 2 cells, got {n}")));
    }
    let vertices = (0..=n).map(|i| [2.0 * i as f64 / n as f64 - 1.0, 0.0]).collect();
    let cells = (0..n).map(|i| [i, i + 1]).collect();
    let mut dirichlet = vec![false; n + 1];
    dirichlet[0] = true;
    dirichlet[n] = true;
    Mesh::new(vertices, Cells::Segments(cells), dirichlet, vec![true; n])
}

/// Uniform mesh of `(-1, 1)` with cell size `h`, which must equal `2/n`.
pub fn uniform_interval_mesh(h: f64) -> Result<Mesh> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Mesh(format!("mesh size must be positive, got {h}")));
    }
    let n = (2.0 / h).round();
    if n < 2.0 || (2.0 / n - h).abs() > 1e-12 * h {
        return Err(Error::Mesh(format!("mesh size {h} is not of the form 2/n with n >= 2")));
    }
    interval_mesh(n as usize)
}

fn base_size(base: &Mesh) -> Result<f64> {
    let cells = match &base.cells {
        Cells::Segments(c) => c,
        Cells::Quads(_) => return Err(Error::Mesh("expected a 1D mesh".into())),
    };
    let v = &base.vertices;
    let first = v[0][0];
    let last = v[v.len() - 1][0];
    if first != -1.0 || last != 1.0 || !base.in_domain.iter().all(|&f| f) {
        return Err(Error::Mesh("base mesh must cover exactly (-1, 1)".into()));
    }
    Ok(2.0 / cells.len() as f64)
}

/// Mirrors `right` (points > 1, increasing) to the left and glues the base mesh in between.
fn extend(base: &Mesh, right: &[f64]) -> Result<Mesh> {
    let n_base = base.n_vertices();
    let mut vertices: Vec<[f64; 2]> = right.iter().rev().map(|&x| [-x, 0.0]).collect();
    vertices.extend(base.vertices.iter().copied());
    vertices.extend(right.iter().map(|&x| [x, 0.0]));
    let total = vertices.len();
    let cells: Vec<[usize; 2]> = (0..total - 1).map(|i| [i, i + 1]).collect();
    let offset = right.len();
    let in_domain = (0..total - 1).map(|i| i >= offset && i + 1 < offset + n_base).collect();
    let mut dirichlet = vec![false; total];
    dirichlet[0] = true;
    dirichlet[total - 1] = true;
    Mesh::new(vertices, Cells::Segments(cells), dirichlet, in_domain)
}

/// Exponentially graded extension of a uniform mesh of `(-1, 1)`: appends
/// `±exp(i h0)` for `i = 1..=ceil(m/h)` with `h0 = h ln(gamma)/m`.
pub fn graded_extension_1d(base: &Mesh, m: f64, gamma: f64) -> Result<Mesh> {
    let h = base_size(base)?;
    if !(gamma > 1.0) || !(m > 0.0) {
        return Err(Error::Mesh(format!("graded extension needs gamma > 1 and M > 0, got gamma={gamma}, M={m}")));
    }
    let count = (m / h - 1e-9).ceil() as usize;
    let h0 = h * gamma.ln() / m;
    let right: Vec<f64> = (1..=count).map(|i| (i as f64 * h0).exp()).collect();
    extend(base, &right)
}

/// Quasi-uniform extension of a uniform mesh of `(-1, 1)` to `(-radius, radius)`
/// with cells no longer than the base cells.
pub fn uniform_extension_1d(base: &Mesh, radius: f64) -> Result<Mesh> {
    let h = base_size(base)?;
    if !(radius > 1.0) {
        return Err(Error::Mesh(format!("extension radius must exceed 1, got {radius}")));
    }
    let count = ((radius - 1.0) / h - 1e-9).ceil() as usize;
    let step = (radius - 1.0) / count as f64;
    let right: Vec<f64> = (1..=count).map(|i| if i == count { radius } else { 1.0 + i as f64 * step }).collect();
    extend(base, &right)
}

pub(super) fn refine(mesh: &Mesh, cells: &[[usize; 2]]) -> Result<Mesh> {
    let mut vertices = Vec::with_capacity(2 * mesh.n_vertices());
    let mut dirichlet = Vec::with_capacity(2 * mesh.n_vertices());
    let mut in_domain = Vec::with_capacity(2 * cells.len());
    let mut out = Vec::with_capacity(2 * cells.len());
    // cells are ordered left to right and share endpoints
    for (i, c) in cells.iter().enumerate() {
        let (a, b) = (mesh.vertices[c[0]][0], mesh.vertices[c[1]][0]);
        if i == 0 {
            vertices.push([a, 0.0]);
            dirichlet.push(mesh.dirichlet[c[0]]);
        }
        let mid = if mesh.in_domain[i] || a * b <= 0.0 || a.abs() < 1.0 || b.abs() < 1.0 {
            0.5 * (a + b)
        } else {
            a.signum() * (a.abs() * b.abs()).sqrt()
        };
        let k = vertices.len() - 1;
        vertices.push([mid, 0.0]);
        vertices.push([b, 0.0]);
        dirichlet.push(false);
        dirichlet.push(mesh.dirichlet[c[1]]);
        out.push([k, k + 1]);
        out.push([k + 1, k + 2]);
        in_domain.push(mesh.in_domain[i]);
        in_domain.push(mesh.in_domain[i]);
    }
    Mesh::new(vertices, Cells::Segments(out), dirichlet, in_domain)
}
