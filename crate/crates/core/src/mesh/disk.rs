use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::{edge_key, edge_multiplicity, Cells, Mesh, RADIAL_TOL};
use crate::error::{Error, Result};

/// Half-width of the central square of the coarse disk mesh.
pub const DEFAULT_HALF_WIDTH: f64 = 0.6 * std::f64::consts::FRAC_1_SQRT_2;

fn unit(p: usize) -> [f64; 2] {
    let a = FRAC_PI_4 + FRAC_PI_2 * p as f64;
    [a.cos(), a.sin()]
}

/// Coarse mesh of the disk of radius `gamma`: a central square, four
/// trapezoids reaching the unit circle and `rings` layers of four cells with
/// radii `gamma^(i/rings)`. Only the square and trapezoids belong to the
/// physical domain; the circle of radius `gamma` is Dirichlet.
pub fn coarse_disk_mesh(gamma: f64, rings: usize, half_width: f64) -> Result<Mesh> {
    if !(half_width > 0.0 && half_width < std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::Mesh(format!("central square half-width must lie in (0, 1/sqrt 2), got {half_width}")));
    }
    if rings > 0 && !(gamma > 1.0) {
        return Err(Error::Mesh(format!("outer radius must exceed 1, got {gamma}")));
    }
    let mut vertices = Vec::with_capacity(8 + 4 * rings);
    for p in 0..4 {
        let u = unit(p);
        vertices.push([half_width * u[0].signum(), half_width * u[1].signum()]);
    }
    for i in 0..=rings {
        let r = if i == rings && rings > 0 { gamma } else { gamma.powf(i as f64 / rings.max(1) as f64) };
        let r = if i == 0 { 1.0 } else { r };
        for p in 0..4 {
            let u = unit(p);
            vertices.push([r * u[0], r * u[1]]);
        }
    }
    let ring = |i: usize, p: usize| 4 + 4 * i + p % 4;
    let mut cells = vec![[0, 1, 2, 3]];
    for p in 0..4 {
        cells.push([p, ring(0, p), ring(0, p + 1), (p + 1) % 4]);
    }
    for i in 0..rings {
        for p in 0..4 {
            cells.push([ring(i, p), ring(i + 1, p), ring(i + 1, p + 1), ring(i, p + 1)]);
        }
    }
    let mut dirichlet = vec![false; vertices.len()];
    for p in 0..4 {
        dirichlet[ring(rings, p)] = true;
    }
    let mut in_domain = vec![false; cells.len()];
    in_domain[..5].iter_mut().for_each(|f| *f = true);
    Mesh::new(vertices, Cells::Quads(cells), dirichlet, in_domain)
}

/// Coarse mesh of the unit disk alone.
pub fn coarse_unit_disk(half_width: f64) -> Result<Mesh> {
    coarse_disk_mesh(1.0, 0, half_width)
}

fn radius(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

fn is_radial(p: [f64; 2]) -> bool {
    radius(p) >= 1.0 - RADIAL_TOL
}

/// Midpoint in `(ln r, theta)`: geometric mean radius, bisected direction.
fn polar_mean(points: &[[f64; 2]]) -> [f64; 2] {
    let mut log_r = 0.0;
    let mut dir = [0.0, 0.0];
    for &p in points {
        let r = radius(p);
        log_r += r.ln();
        dir[0] += p[0] / r;
        dir[1] += p[1] / r;
    }
    let r = (log_r / points.len() as f64).exp();
    let n = dir[0].hypot(dir[1]);
    [r * dir[0] / n, r * dir[1] / n]
}

fn edge_midpoint(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    if is_radial(a) && is_radial(b) {
        let (ra, rb) = (radius(a), radius(b));
        let r = (ra * rb).sqrt();
        let dir = [a[0] / ra + b[0] / rb, a[1] / ra + b[1] / rb];
        let n = dir[0].hypot(dir[1]);
        [r * dir[0] / n, r * dir[1] / n]
    } else {
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }
}

pub(super) fn refine(mesh: &Mesh, cells: &[[usize; 4]]) -> Result<Mesh> {
    let multiplicity = edge_multiplicity(cells);
    let mut vertices = mesh.vertices.clone();
    let mut dirichlet = mesh.dirichlet.clone();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out = Vec::with_capacity(4 * cells.len());
    let mut in_domain = Vec::with_capacity(4 * cells.len());
    for (ci, c) in cells.iter().enumerate() {
        let mut m = [0usize; 4];
        for k in 0..4 {
            let (a, b) = (c[k], c[(k + 1) % 4]);
            let key = edge_key(a, b);
            m[k] = *mids.entry(key).or_insert_with(|| {
                vertices.push(edge_midpoint(mesh.vertices[key.0], mesh.vertices[key.1]));
                dirichlet.push(multiplicity[&key] == 1 && mesh.dirichlet[a] && mesh.dirichlet[b]);
                vertices.len() - 1
            });
        }
        let corners = c.map(|v| mesh.vertices[v]);
        let center = if mesh.in_domain[ci] {
            let mut p = [0.0, 0.0];
            for k in 0..4 {
                let e = vertices[m[k]];
                p[0] += 0.5 * e[0] - 0.25 * corners[k][0];
                p[1] += 0.5 * e[1] - 0.25 * corners[k][1];
            }
            p
        } else {
            polar_mean(&corners)
        };
        vertices.push(center);
        dirichlet.push(false);
        let ctr = vertices.len() - 1;
        let [v0, v1, v2, v3] = *c;
        let [m01, m12, m23, m30] = m;
        out.push([v0, m01, ctr, m30]);
        out.push([m01, v1, m12, ctr]);
        out.push([ctr, m12, v2, m23]);
        out.push([m30, ctr, m23, v3]);
        in_domain.extend([mesh.in_domain[ci]; 4]);
    }
    Mesh::new(vertices, Cells::Quads(out), dirichlet, in_domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coarse_counts_and_validity() {
        let m = coarse_disk_mesh(6.0, 4, DEFAULT_HALF_WIDTH).unwrap();
        assert_eq!(m.n_vertices(), 24);
        assert_eq!(m.n_cells(), 21);
        assert_eq!(m.dirichlet.iter().filter(|&&d| d).count(), 4);
        let d = coarse_unit_disk(DEFAULT_HALF_WIDTH).unwrap();
        assert_eq!((d.n_vertices(), d.n_cells(), d.n_dofs()), (8, 5, 4));
    }

    #[test]
    fn vertex_counts_match_refinement_levels() {
        let mut m = coarse_disk_mesh(6.0, 4, DEFAULT_HALF_WIDTH).unwrap();
        let mut counts = vec![m.n_vertices()];
        for _ in 0..5 {
            m = m.refine().unwrap();
            counts.push(m.n_vertices());
        }
        assert_eq!(counts, vec![24, 89, 345, 1361, 5409, 21569]);
        assert_eq!(m.n_cells(), 21 * 4usize.pow(5));
    }

    #[test]
    fn ring_split_is_geometric_mean() {
        let m = coarse_disk_mesh(16.0, 2, DEFAULT_HALF_WIDTH).unwrap();
        let fine = m.refine().unwrap();
        let radii: Vec<f64> = fine.vertices.iter().map(|&p| radius(p)).collect();
        // ring radii 1, 4, 16 -> split points 2 and 8
        assert!(radii.iter().any(|&r| (r - 2.0).abs() < 1e-13));
        assert!(radii.iter().any(|&r| (r - 8.0).abs() < 1e-13));
        let outer = fine.vertices.iter().zip(&fine.dirichlet).filter(|(_, &d)| d);
        for (p, _) in outer {
            assert_relative_eq!(radius(*p), 16.0, max_relative = 1e-14);
        }
        assert_eq!(fine.dirichlet.iter().filter(|&&d| d).count(), 8);
    }

    #[test]
    fn domain_vertices_do_not_depend_on_gamma() {
        let a = coarse_disk_mesh(6.0, 4, DEFAULT_HALF_WIDTH).unwrap().refine_times(3).unwrap();
        let b = coarse_disk_mesh(40.0, 4, DEFAULT_HALF_WIDTH).unwrap().refine_times(3).unwrap();
        let da = a.domain_part().unwrap();
        let db = b.domain_part().unwrap();
        assert_eq!(da.vertices, db.vertices);
        let d = coarse_unit_disk(DEFAULT_HALF_WIDTH).unwrap().refine_times(3).unwrap();
        let mut x = d.vertices.clone();
        let mut y = da.vertices.clone();
        let key = |p: &[f64; 2]| (p[0].to_bits(), p[1].to_bits());
        x.sort_by_key(key);
        y.sort_by_key(key);
        assert_eq!(x, y);
        assert_eq!(d.n_dofs() + d.dirichlet.iter().filter(|&&f| f).count(), d.n_vertices());
    }

    #[test]
    fn boundary_vertices_lie_on_unit_circle() {
        let d = coarse_unit_disk(DEFAULT_HALF_WIDTH).unwrap().refine_times(3).unwrap();
        let on_circle = d.vertices.iter().zip(&d.dirichlet).filter(|(_, &f)| f);
        let mut n = 0;
        for (p, _) in on_circle {
            assert!((radius(*p) - 1.0).abs() < 1e-14);
            n += 1;
        }
        assert_eq!(n, 32);
        assert!(d.quality().max_aspect < 5.0);
    }
}
