use std::time::Instant;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final relative residual `||b - Ax|| / ||b||`.
    pub residual: f64,
    pub seconds: f64,
    /// Relative residual after each iteration, starting with the initial one.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradients from a zero initial guess.
///
/// `apply` must be symmetric positive definite; a non-positive curvature
/// `p^T A p` aborts with [`Error::NotSpd`].
pub fn cg(
    apply: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    precond: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let start = Instant::now();
    let n = b.len();
    let mut x = vec![0.0; n];
    let b_norm = dot(b, b).sqrt();
    let mut stats = SolveStats { iterations: 0, residual: 0.0, seconds: 0.0, history: vec![] };
    if b_norm == 0.0 {
        stats.history.push(0.0);
        return Ok((x, stats));
    }
    let mut r = b.to_vec();
    let precondition = |r: &[f64]| precond.map_or_else(|| r.to_vec(), |m| m(r));
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    stats.history.push(res);
    while res > tol {
        if stats.iterations >= max_iter {
            return Err(Error::NoConvergence { iterations: stats.iterations, residual: res });
        }
        let ap = apply(&p)?;
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return Err(Error::NotSpd(format!("operator not SPD: p^T A p = {curvature:e} at iteration {}", stats.iterations)));
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        stats.iterations += 1;
        res = dot(&r, &r).sqrt() / b_norm;
        stats.history.push(res);
        if res <= tol {
            break;
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    stats.residual = res;
    stats.seconds = start.elapsed().as_secs_f64();
    Ok((x, stats))
}
