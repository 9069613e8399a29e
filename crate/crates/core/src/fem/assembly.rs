use super::SparseMatrix;
use crate::error::Result;
use crate::mesh::{Cells, Mesh};
use crate::parallel::{self, Execution};
use crate::quadrature::Rule;

/// Gauss points per direction used for the Q1 matrices.
pub const MATRIX_GAUSS: usize = 3;

const REF: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Local mass and stiffness matrices of a 1D segment of length `len`.
pub fn segment_matrices(len: f64) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let m = [[len / 3.0, len / 6.0], [len / 6.0, len / 3.0]];
    let a = [[1.0 / len, -1.0 / len], [-1.0 / len, 1.0 / len]];
    (m, a)
}

fn q1_values(xi: f64, eta: f64) -> [f64; 4] {
    REF.map(|r| 0.25 * (1.0 + r[0] * xi) * (1.0 + r[1] * eta))
}

fn q1_grads(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    REF.map(|r| [0.25 * r[0] * (1.0 + r[1] * eta), 0.25 * r[1] * (1.0 + r[0] * xi)])
}

/// Physical point, Jacobian determinant and physical shape gradients at a reference point.
fn q1_map(x: &[[f64; 2]; 4], xi: f64, eta: f64) -> ([f64; 2], f64, [[f64; 2]; 4]) {
    let n = q1_values(xi, eta);
    let g = q1_grads(xi, eta);
    let mut p = [0.0; 2];
    let mut j = [[0.0; 2]; 2];
    for a in 0..4 {
        for d in 0..2 {
            p[d] += n[a] * x[a][d];
            j[d][0] += x[a][d] * g[a][0];
            j[d][1] += x[a][d] * g[a][1];
        }
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let grads = g.map(|gr| [gr[0] * inv[0][0] + gr[1] * inv[1][0], gr[0] * inv[0][1] + gr[1] * inv[1][1]]);
    (p, det, grads)
}

/// Local Q1 mass and stiffness matrices by tensor Gauss quadrature.
pub fn quad_matrices(x: &[[f64; 2]; 4], rule: &Rule) -> ([[f64; 4]; 4], [[f64; 4]; 4]) {
    let mut m = [[0.0; 4]; 4];
    let mut a = [[0.0; 4]; 4];
    for (xi, wx) in rule.nodes.iter().zip(&rule.weights) {
        for (eta, wy) in rule.nodes.iter().zip(&rule.weights) {
            let n = q1_values(*xi, *eta);
            let (_, det, g) = q1_map(x, *xi, *eta);
            let w = wx * wy * det;
            for i in 0..4 {
                for k in 0..4 {
                    m[i][k] += w * n[i] * n[k];
                    a[i][k] += w * (g[i][0] * g[k][0] + g[i][1] * g[k][1]);
                }
            }
        }
    }
    (m, a)
}

fn corners(mesh: &Mesh, c: &[usize; 4]) -> [[f64; 2]; 4] {
    c.map(|v| mesh.vertices[v])
}

/// Mass and stiffness matrices over the cells selected by `keep`, with rows
/// and columns numbered by `numbering` (vertices mapped to `None` are eliminated).
pub fn assemble_pair_with(
    mesh: &Mesh,
    numbering: &[Option<usize>],
    n: usize,
    keep: impl Fn(usize) -> bool + Sync,
    exec: Execution,
) -> (SparseMatrix, SparseMatrix) {
    let cells: Vec<usize> = (0..mesh.n_cells()).filter(|&i| keep(i)).collect();
    let chunks: Vec<&[usize]> = cells.chunks(1024).collect();
    let rule = Rule::legendre(MATRIX_GAUSS).expect("fixed rule");
    let parts = parallel::map(exec, &chunks, |chunk| {
        let mut tm = Vec::new();
        let mut ta = Vec::new();
        let mut push = |vs: &[usize], lm: &dyn Fn(usize, usize) -> f64, la: &dyn Fn(usize, usize) -> f64| {
            for (i, &vi) in vs.iter().enumerate() {
                let Some(r) = numbering[vi] else { continue };
                for (k, &vk) in vs.iter().enumerate() {
                    let Some(c) = numbering[vk] else { continue };
                    tm.push((r, c, lm(i, k)));
                    ta.push((r, c, la(i, k)));
                }
            }
        };
        for &ci in chunk.iter() {
            match &mesh.cells {
                Cells::Segments(s) => {
                    let c = s[ci];
                    let (lm, la) = segment_matrices(mesh.vertices[c[1]][0] - mesh.vertices[c[0]][0]);
                    push(&c, &|i, k| lm[i][k], &|i, k| la[i][k]);
                }
                Cells::Quads(q) => {
                    let c = q[ci];
                    let (lm, la) = quad_matrices(&corners(mesh, &c), &rule);
                    push(&c, &|i, k| lm[i][k], &|i, k| la[i][k]);
                }
            }
        }
        (tm, ta)
    });
    let (mut tm, mut ta) = (Vec::new(), Vec::new());
    for (m, a) in parts {
        tm.extend(m);
        ta.extend(a);
    }
    (SparseMatrix::from_triplets(n, &tm, true), SparseMatrix::from_triplets(n, &ta, true))
}

/// Mass and stiffness matrices on the unknowns of `mesh`.
pub fn assemble_pair(mesh: &Mesh, exec: Execution) -> (SparseMatrix, SparseMatrix) {
    assemble_pair_with(mesh, mesh.dof_map(), mesh.n_dofs(), |_| true, exec)
}

pub fn assemble_mass(mesh: &Mesh) -> SparseMatrix {
    assemble_pair(mesh, Execution::Sequential).0
}

pub fn assemble_stiffness(mesh: &Mesh) -> SparseMatrix {
    assemble_pair(mesh, Execution::Sequential).1
}

/// Numbering that keeps every vertex (no Dirichlet elimination).
pub fn all_vertices(mesh: &Mesh) -> Vec<Option<usize>> {
    (0..mesh.n_vertices()).map(Some).collect()
}

/// Calls `visit(cell, x, weight, shape values)` at every quadrature point,
/// `order` points per direction.
fn for_each_point(mesh: &Mesh, rule: &Rule, mut visit: impl FnMut(usize, [f64; 2], f64, &[f64]) -> Result<()>) -> Result<()> {
    for ci in 0..mesh.n_cells() {
        match &mesh.cells {
            Cells::Segments(s) => {
                let c = s[ci];
                let (a, b) = (mesh.vertices[c[0]][0], mesh.vertices[c[1]][0]);
                for (x, w) in rule.mapped(a, b) {
                    let t = (x - a) / (b - a);
                    visit(ci, [x, 0.0], w, &[1.0 - t, t])?;
                }
            }
            Cells::Quads(q) => {
                let x = corners(mesh, &q[ci]);
                for (xi, wx) in rule.nodes.iter().zip(&rule.weights) {
                    for (eta, wy) in rule.nodes.iter().zip(&rule.weights) {
                        let (p, det, _) = q1_map(&x, *xi, *eta);
                        visit(ci, p, wx * wy * det, &q1_values(*xi, *eta))?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// `(f, phi_j)` for every entry of `numbering`, by Gauss quadrature with
/// `order` points per direction on each cell.
pub fn assemble_load_with(
    mesh: &Mesh,
    numbering: &[Option<usize>],
    n: usize,
    f: &dyn Fn([f64; 2]) -> Result<f64>,
    order: usize,
) -> Result<Vec<f64>> {
    let rule = Rule::legendre(order)?;
    let mut b = vec![0.0; n];
    for_each_point(mesh, &rule, |ci, x, w, phi| {
        let fx = f(x)?;
        for (k, &v) in mesh.cells.vertices(ci).iter().enumerate() {
            if let Some(r) = numbering[v] {
                b[r] += w * fx * phi[k];
            }
        }
        Ok(())
    })?;
    Ok(b)
}

pub fn assemble_load(mesh: &Mesh, f: &dyn Fn([f64; 2]) -> Result<f64>, order: usize) -> Result<Vec<f64>> {
    assemble_load_with(mesh, mesh.dof_map(), mesh.n_dofs(), f, order)
}

/// `||u_h - u||_{L2}` where `u_h` has coefficients `coeffs` on the unknowns of
/// `mesh` (zero on Dirichlet vertices).
pub fn l2_error(mesh: &Mesh, coeffs: &[f64], u: &dyn Fn([f64; 2]) -> f64, order: usize) -> Result<f64> {
    let rule = Rule::legendre(order)?;
    let mut sum = 0.0;
    for_each_point(mesh, &rule, |ci, x, w, phi| {
        let uh: f64 = mesh.cells.vertices(ci).iter().zip(phi).map(|(&v, p)| mesh.dof(v).map_or(0.0, |d| coeffs[d]) * p).sum();
        sum += w * (uh - u(x)).powi(2);
        Ok(())
    })?;
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::mesh::{coarse_disk_mesh, coarse_unit_disk, graded_extension_1d, uniform_interval_mesh, Cells, DEFAULT_HALF_WIDTH};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn uniform_1d_entries() {
        let h = 0.125;
        let mesh = uniform_interval_mesh(h).unwrap();
        let (m, a) = assemble_pair(&mesh, Execution::Sequential);
        assert_eq!(m.n(), 15);
        assert!((m.get(3, 3) - 2.0 * h / 3.0).abs() < 1e-15);
        assert!((m.get(3, 4) - h / 6.0).abs() < 1e-15);
        assert!((a.get(3, 3) - 2.0 / h).abs() < 1e-13);
        assert!((a.get(3, 4) + 1.0 / h).abs() < 1e-13);
        assert_eq!(m.asymmetry(), 0.0);
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn nonuniform_mass_diagonal() {
        let mesh = Mesh::new(
            vec![[-1.0, 0.0], [-0.2, 0.0], [1.0, 0.0]],
            Cells::Segments(vec![[0, 1], [1, 2]]),
            vec![true, false, true],
            vec![true, true],
        )
        .unwrap();
        let m = assemble_mass(&mesh);
        assert!((m.get(0, 0) - (0.8 + 1.2) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unit_square_q1() {
        let rule = Rule::legendre(MATRIX_GAUSS).unwrap();
        let (m, a) = quad_matrices(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], &rule);
        assert!((a[0][0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((a[0][2] + 1.0 / 3.0).abs() < 1e-15);
        assert!((a[0][1] + 1.0 / 6.0).abs() < 1e-15);
        assert!((m[0][0] - 1.0 / 9.0).abs() < 1e-15);
        assert!((m[0][2] - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn full_matrices_partition_of_unity() {
        let mesh = coarse_disk_mesh(6.0, 4, DEFAULT_HALF_WIDTH).unwrap().refine_times(2).unwrap();
        let num = all_vertices(&mesh);
        let (m, a) = assemble_pair_with(&mesh, &num, mesh.n_vertices(), |_| true, Execution::Parallel);
        let ones = vec![1.0; mesh.n_vertices()];
        let am = a.matvec(&ones);
        assert!(am.iter().all(|v| v.abs() < 1e-12));
        let area: f64 = m.matvec(&ones).iter().sum();
        // straight-edged cells: the outer boundary is the inscribed 16-gon of radius 6
        let poly = 0.5 * 16.0 * 36.0 * (2.0 * std::f64::consts::PI / 16.0).sin();
        assert!((area - poly).abs() < 1e-10 * poly, "{area} vs {poly}");
    }

    #[test]
    fn graded_matches_dense_integration() {
        let base = uniform_interval_mesh(2.0 / 3.0).unwrap();
        let ext = graded_extension_1d(&base, 0.5, 3.0).unwrap();
        assert_eq!(ext.n_cells(), 5);
        let (m, a) = assemble_pair(&ext, Execution::Sequential);
        let xs: Vec<f64> = ext.vertices.iter().map(|v| v[0]).collect();
        let hat = |j: usize, x: f64| -> (f64, f64) {
            if j > 0 && x >= xs[j - 1] && x <= xs[j] {
                ((x - xs[j - 1]) / (xs[j] - xs[j - 1]), 1.0 / (xs[j] - xs[j - 1]))
            } else if j + 1 < xs.len() && x > xs[j] && x <= xs[j + 1] {
                ((xs[j + 1] - x) / (xs[j + 1] - xs[j]), -1.0 / (xs[j + 1] - xs[j]))
            } else {
                (0.0, 0.0)
            }
        };
        let rule = Rule::legendre(4).unwrap();
        for i in 1..xs.len() - 1 {
            for j in 1..xs.len() - 1 {
                let (mut dm, mut da) = (0.0, 0.0);
                for c in 0..xs.len() - 1 {
                    for (x, w) in rule.mapped(xs[c], xs[c + 1]) {
                        let (pi, gi) = hat(i, x);
                        let (pj, gj) = hat(j, x);
                        dm += w * pi * pj;
                        da += w * gi * gj;
                    }
                }
                assert!((m.get(i - 1, j - 1) - dm).abs() < 1e-13);
                assert!((a.get(i - 1, j - 1) - da).abs() < 1e-13 * da.abs().max(1.0));
            }
        }
    }

    #[test]
    fn positive_definite_on_random_vectors() {
        let mesh = coarse_disk_mesh(6.0, 4, DEFAULT_HALF_WIDTH).unwrap().refine_times(2).unwrap();
        let (m, a) = assemble_pair(&mesh, Execution::Sequential);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let x: Vec<f64> = (0..m.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dot = |y: Vec<f64>| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
            assert!(dot(m.matvec(&x)) > 0.0);
            assert!(dot(a.matvec(&x)) > 0.0);
        }
    }

    #[test]
    fn loads() {
        let h = 0.25;
        let mesh = uniform_interval_mesh(h).unwrap();
        let b = assemble_load(&mesh, &|_| Ok(1.0), 6).unwrap();
        assert!(b.iter().all(|v| (v - h).abs() < 1e-15));
        let disk = coarse_unit_disk(DEFAULT_HALF_WIDTH).unwrap().refine_times(3).unwrap();
        let all = all_vertices(&disk);
        let total: f64 = assemble_load_with(&disk, &all, disk.n_vertices(), &|_| Ok(1.0), 6).unwrap().iter().sum();
        let poly = 16.0 * (2.0 * std::f64::consts::PI / 32.0).sin();
        assert!((total - poly).abs() < 1e-3);
        assert!((total - std::f64::consts::PI).abs() < 0.025);
        assert!(assemble_load(&mesh, &|_| Err(Error::Evaluation("boom".into())), 4).is_err());
    }

    #[test]
    fn l2_error_basics() {
        let mesh = uniform_interval_mesh(0.25).unwrap();
        let zero = vec![0.0; mesh.n_dofs()];
        assert_relative_eq!(l2_error(&mesh, &zero, &|_| 1.0, 4).unwrap(), 2f64.sqrt(), max_relative = 1e-14);
        let coeffs: Vec<f64> = mesh.dof_vertices().iter().map(|&v| 1.0 - mesh.vertices[v][0].abs()).collect();
        assert!(l2_error(&mesh, &coeffs, &|x| 1.0 - x[0].abs(), 6).unwrap() < 1e-14);
    }
}
