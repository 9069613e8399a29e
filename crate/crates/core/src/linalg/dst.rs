//! Sine-transform preconditioner for the 1D fractional system on a uniform mesh.
//!
//! With `h' = 1/(n+1)` the matrix `S_ij = sqrt(2h') sin(i j pi h')` is
//! symmetric and `S^2 = I`. Its columns diagonalise both the P1 stiffness and
//! mass matrices of the uniform mesh of `(-1, 1)` with `n` interior vertices.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// `S v`, evaluated with an FFT of length `2(n+1)`.
pub fn dst_apply(v: &[f64]) -> Vec<f64> {
    Dst::new(v.len()).apply(v)
}

#[derive(Clone)]
struct Dst {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dst").field("n", &self.n).finish()
    }
}

impl Dst {
    fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Self { n, fft }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let len = 2 * (n + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (i, &x) in v.iter().enumerate() {
            buf[i + 1].re = x;
            buf[len - 1 - i].re = -x;
        }
        self.fft.process(&mut buf);
        let scale = (2.0 / (n + 1) as f64).sqrt();
        (1..=n).map(|k| -0.5 * buf[k].im * scale).collect()
    }
}

/// `B = S Lambda S` with `Lambda_j = lambda_j^{-s} / m_j`, where `a_j`, `m_j`
/// are the stiffness and mass eigenvalues and `lambda_j = a_j / m_j`.
#[derive(Debug, Clone)]
pub struct DstPreconditioner {
    pub n: usize,
    pub h: f64,
    pub s: f64,
    pub diagonal: Vec<f64>,
    dst: Dst,
}

/// Stiffness eigenvalue `(2 - 2cos(j pi h'))/h` of the uniform P1 mesh of size `h`.
pub fn stiffness_eigenvalue(j: usize, n: usize, h: f64) -> f64 {
    (2.0 - 2.0 * (j as f64 * PI / (n + 1) as f64).cos()) / h
}

/// Mass eigenvalue `h (4 + 2cos(j pi h'))/6`.
pub fn mass_eigenvalue(j: usize, n: usize, h: f64) -> f64 {
    h * (4.0 + 2.0 * (j as f64 * PI / (n + 1) as f64).cos()) / 6.0
}

impl DstPreconditioner {
    /// Preconditioner for `n` interior dofs of the uniform mesh of `(-1, 1)`
    /// with `h = 2/(n+1)`.
    pub fn new(n: usize, s: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("DST preconditioner needs at least one unknown".into()));
        }
        crate::sinc::check_order(s)?;
        let h = 2.0 / (n + 1) as f64;
        let diagonal = (1..=n)
            .map(|j| {
                let a = stiffness_eigenvalue(j, n, h);
                let m = mass_eigenvalue(j, n, h);
                (a / m).powf(-s) / m
            })
            .collect();
        Ok(Self { n, h, s, diagonal, dst: Dst::new(n) })
    }

    /// Same transform with a caller supplied diagonal.
    pub fn with_diagonal(diagonal: Vec<f64>, s: f64) -> Self {
        let n = diagonal.len();
        Self { n, h: 2.0 / (n + 1) as f64, s, diagonal, dst: Dst::new(n) }
    }

    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut y = self.dst.apply(r);
        for (v, d) in y.iter_mut().zip(&self.diagonal) {
            *v *= d;
        }
        self.dst.apply(&y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_pair, SparseMatrix};
    use crate::mesh::interval_mesh;
    use crate::parallel::Execution;
    use rand::{Rng, SeedableRng};

    fn dense_s(n: usize) -> Vec<Vec<f64>> {
        let hp = 1.0 / (n + 1) as f64;
        (1..=n).map(|i| (1..=n).map(|j| (2.0 * hp).sqrt() * (i as f64 * j as f64 * PI * hp).sin()).collect()).collect()
    }

    #[test]
    fn fast_transform_matches_dense() {
        for n in [1, 5, 7, 31, 40] {
            let s = dense_s(n);
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * 1.3).cos()).collect();
            let fast = dst_apply(&v);
            for i in 0..n {
                let d: f64 = (0..n).map(|j| s[i][j] * v[j]).sum();
                assert!((fast[i] - d).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn involution() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in [15, 63, 100] {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = dst_apply(&dst_apply(&v));
            assert!(v.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    fn column(n: usize, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; n];
        e[j - 1] = 1.0;
        dst_apply(&e)
    }

    #[test]
    fn eigenpairs_of_uniform_mesh() {
        let n = 63;
        let mesh = interval_mesh(n + 1).unwrap();
        let (m, a): (SparseMatrix, SparseMatrix) = assemble_pair(&mesh, Execution::Sequential);
        let h = 2.0 / (n + 1) as f64;
        for j in 1..=n {
            let v = column(n, j);
            let av = a.matvec(&v);
            let mv = m.matvec(&v);
            let (aj, mj) = (stiffness_eigenvalue(j, n, h), mass_eigenvalue(j, n, h));
            for i in 0..n {
                assert!((av[i] - aj * v[i]).abs() < 1e-10);
                assert!((mv[i] - mj * v[i]).abs() < 1e-10);
                assert!((av[i] - aj / mj * mv[i]).abs() < 1e-10);
            }
        }
        // the expression (2 + cos)/h does not give eigenvalues
        let v = column(n, 3);
        let wrong = (2.0 + (3.0 * PI / (n + 1) as f64).cos()) / h;
        assert!((a.matvec(&v)[0] - wrong * v[0]).abs() > 1.0);
    }

    #[test]
    fn symmetric_and_identity_cases() {
        let n = 31;
        let id = DstPreconditioner::with_diagonal(vec![1.0; n], 0.5);
        let v: Vec<f64> = (0..n).map(|i| i as f64).collect();
        assert!(id.apply(&v).iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12));
        let p = DstPreconditioner::new(n, 0.5).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (rb, qb) = (dot(&r, &p.apply(&q)), dot(&q, &p.apply(&r)));
        assert!((rb - qb).abs() < 1e-12 * rb.abs().max(1.0));
        assert!(dot(&r, &p.apply(&r)) > 0.0);
        assert!(DstPreconditioner::new(0, 0.5).is_err());
    }
}
