//! Analytic solutions, right-hand sides, and the 1D Riemann–Liouville forms
//! used as an independent check of the assembled operator.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fem::SparseMatrix;
use crate::mesh::Mesh;
use crate::quadrature::Rule;
use crate::sinc::check_order;
use crate::specfun::{gamma, hyp2f1, Hyp2F1Params};

const JACOBI_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `f = 1`, solution `C (1 - |x|^2)^s`.
    Nonsmooth,
    /// `u = 1 - |x|^2` with a hypergeometric right-hand side.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelProblem {
    pub kind: ProblemKind,
    pub dim: usize,
    pub s: f64,
}

fn norm2(x: [f64; 2], dim: usize) -> f64 {
    if dim == 1 {
        x[0] * x[0]
    } else {
        x[0] * x[0] + x[1] * x[1]
    }
}

impl ModelProblem {
    pub fn new(kind: ProblemKind, dim: usize, s: f64) -> Result<Self> {
        check_order(s)?;
        if dim != 1 && dim != 2 {
            return Err(Error::Domain(format!("dimension must be 1 or 2, got {dim}")));
        }
        Ok(Self { kind, dim, s })
    }

    pub fn u_exact(&self, x: [f64; 2]) -> f64 {
        match self.kind {
            ProblemKind::Nonsmooth => u_nonsmooth(x, self.s, self.dim),
            ProblemKind::Smooth => (1.0 - norm2(x, self.dim)).max(0.0),
        }
    }

    pub fn rhs(&self, x: [f64; 2]) -> Result<f64> {
        match self.kind {
            ProblemKind::Nonsmooth => Ok(1.0),
            ProblemKind::Smooth => f_smooth(x, self.s, self.dim),
        }
    }
}

/// `2^{-2s} Γ(d/2) / (Γ(d/2+s) Γ(1+s)) (1 - |x|^2)^s`, zero outside the unit ball.
pub fn u_nonsmooth(x: [f64; 2], s: f64, dim: usize) -> f64 {
    let r2 = norm2(x, dim);
    if r2 >= 1.0 {
        return 0.0;
    }
    let d = dim as f64;
    let c = 2f64.powf(-2.0 * s) * gamma(d / 2.0).unwrap() / (gamma(d / 2.0 + s).unwrap() * gamma(1.0 + s).unwrap());
    c * (1.0 - r2).powf(s)
}

/// `2^{2s} Γ(d/2+s) / (Γ(d/2) Γ(2-s)) 2F1(d/2+s, s-1; d/2; |x|^2)` for `|x| <= 1`.
pub fn f_smooth(x: [f64; 2], s: f64, dim: usize) -> Result<f64> {
    let z = norm2(x, dim);
    if z > 1.0 {
        return Err(Error::Evaluation(format!("smooth right-hand side evaluated outside the unit ball (|x|^2 = {z})")));
    }
    let d = dim as f64;
    let pref = 2f64.powf(2.0 * s) * gamma(d / 2.0 + s)? / (gamma(d / 2.0)? * gamma(2.0 - s)?);
    let f = hyp2f1(Hyp2F1Params { a: d / 2.0 + s, b: s - 1.0, c: d / 2.0, z }).map_err(|e| {
        if z == 1.0 {
            Error::Evaluation(format!("smooth right-hand side is singular on |x| = 1 for s = {s} >= 1/2"))
        } else {
            e
        }
    })?;
    Ok(pref * f)
}

/// Continuous or discontinuous piecewise linear function on increasing
/// breakpoints, extended by zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    /// Finite element function with coefficients on the unknowns of a 1D mesh.
    pub fn from_mesh(mesh: &Mesh, coeffs: &[f64]) -> Self {
        let knots = mesh.vertices.iter().map(|v| v[0]).collect();
        let values = (0..mesh.n_vertices()).map(|v| mesh.dof(v).map_or(0.0, |d| coeffs[d])).collect();
        Self { knots, values }
    }

    /// Slope jump and value jump at every knot.
    fn jumps(&self) -> Vec<(f64, f64, f64)> {
        let n = self.knots.len();
        let slope = |c: usize| (self.values[c + 1] - self.values[c]) / (self.knots[c + 1] - self.knots[c]);
        (0..n)
            .map(|b| {
                let left = if b > 0 { slope(b - 1) } else { 0.0 };
                let right = if b + 1 < n { slope(b) } else { 0.0 };
                let v_left = if b > 0 { self.values[b] } else { 0.0 };
                let v_right = if b + 1 < n { self.values[b] } else { 0.0 };
                (self.knots[b], right - left, v_right - v_left)
            })
            .collect()
    }

    /// Left Riemann–Liouville derivative of order `mu < 1` at `x`; negative
    /// orders give the fractional integral of order `-mu`, zero the function.
    pub fn left_derivative(&self, mu: f64, x: f64) -> Result<f64> {
        let (g1, g2) = (gamma(1.0 - mu)?, gamma(2.0 - mu)?);
        let mut acc = 0.0;
        for (xb, alpha, jump) in self.jumps() {
            if x > xb {
                acc += alpha * (x - xb).powf(1.0 - mu) / g2 + jump * (x - xb).powf(-mu) / g1;
            }
        }
        Ok(acc)
    }

    /// Right Riemann–Liouville derivative of order `mu < 1` at `x`.
    pub fn right_derivative(&self, mu: f64, x: f64) -> Result<f64> {
        let (g1, g2) = (gamma(1.0 - mu)?, gamma(2.0 - mu)?);
        let mut acc = 0.0;
        for (xb, alpha, jump) in self.jumps() {
            if x < xb {
                acc += alpha * (xb - x).powf(1.0 - mu) / g2 - jump * (xb - x).powf(-mu) / g1;
            }
        }
        Ok(acc)
    }
}

/// Left Riemann–Liouville derivative of the finite element function `coeffs`.
pub fn rl_left_deriv_pwl(mesh: &Mesh, coeffs: &[f64], mu: f64, x: f64) -> Result<f64> {
    PiecewiseLinear::from_mesh(mesh, coeffs).left_derivative(mu, x)
}

fn check_rl_order(s: f64) -> Result<()> {
    check_order(s)?;
    if (s - 0.5).abs() < 1e-12 {
        return Err(Error::Domain("the Riemann-Liouville form is invalid at s = 0.5 (cos(s pi) = 0)".into()));
    }
    Ok(())
}

fn interval_knots(mesh: &Mesh) -> Result<Vec<f64>> {
    if mesh.dim() != 1 || mesh.dirichlet.iter().filter(|&&d| d).count() != 2 || !mesh.in_domain.iter().all(|&f| f) {
        return Err(Error::Mesh("expected a 1D mesh of the physical interval".into()));
    }
    Ok(mesh.vertices.iter().map(|v| v[0]).collect())
}

/// Exact stiffness matrix `[(dL^s phi_i, dR^s phi_j) + (dL^s phi_j, dR^s phi_i)] / (2 cos(s pi))`
/// on the interior hats of a 1D mesh of `(-1, 1)`, stored densely.
///
/// On each cell the one-sided derivatives split into the power term of the
/// breakpoint at the near end plus a part that is smooth on the cell; the
/// products are integrated with a Beta function, Gauss–Jacobi and
/// Gauss–Legendre rules respectively.
pub fn rl_stiffness_1d(mesh: &Mesh, s: f64) -> Result<SparseMatrix> {
    check_rl_order(s)?;
    let x = interval_knots(mesh)?;
    let n = x.len() - 2;
    let q = 1.0 - s;
    let g2 = gamma(2.0 - s)?;
    let beta = gamma(q + 1.0)? * gamma(q + 1.0)? / gamma(2.0 * q + 2.0)?;
    let legendre = Rule::legendre(JACOBI_POINTS)?;
    let jac_left = Rule::jacobi(JACOBI_POINTS, 0.0, q)?;
    let jac_right = Rule::jacobi(JACOBI_POINTS, q, 0.0)?;
    // slope jumps of hat i (interior vertex i+1) at knots i, i+1, i+2
    let hat_jumps = |i: usize| {
        let (hl, hr) = (x[i + 1] - x[i], x[i + 2] - x[i + 1]);
        [(i, 1.0 / hl), (i + 1, -1.0 / hl - 1.0 / hr), (i + 2, 1.0 / hr)]
    };
    let smooth_left = |i: usize, c: usize, y: f64| -> f64 {
        hat_jumps(i).iter().filter(|(b, _)| *b < c).map(|&(b, a)| a * (y - x[b]).powf(q)).sum::<f64>() / g2
    };
    let smooth_right = |j: usize, c: usize, y: f64| -> f64 {
        hat_jumps(j).iter().filter(|(b, _)| *b > c + 1).map(|&(b, a)| a * (x[b] - y).powf(q)).sum::<f64>() / g2
    };
    let near = |i: usize, b: usize| hat_jumps(i).iter().find(|e| e.0 == b).map_or(0.0, |e| e.1) / g2;

    // (dL phi_i, dR phi_j): the product lives on cells i..=j+1
    let lr = |i: usize, j: usize| -> f64 {
        let mut total = 0.0;
        for c in i..(j + 2).min(x.len() - 1) {
            let (a, b) = (x[c], x[c + 1]);
            let len = b - a;
            let big_a = near(i, c);
            let big_b = near(j, c + 1);
            let mut v = big_a * big_b * len.powf(2.0 * q + 1.0) * beta;
            if big_a != 0.0 {
                // (x - a)^q weight: beta exponent on the (1 + t) side
                let scale = (0.5 * len).powf(q);
                v += big_a * scale * jac_left.integrate(a, b, |y| smooth_right(j, c, y));
            }
            if big_b != 0.0 {
                let scale = (0.5 * len).powf(q);
                v += big_b * scale * jac_right.integrate(a, b, |y| smooth_left(i, c, y));
            }
            v += legendre.integrate(a, b, |y| smooth_left(i, c, y) * smooth_right(j, c, y));
            total += v;
        }
        total
    };
    let denom = 2.0 * (s * PI).cos();
    let mut trip = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in i..n {
            let v = (lr(i, j) + lr(j, i)) / denom;
            trip.push((i, j, v));
            if i != j {
                trip.push((j, i, v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(n, &trip, true))
}

/// Exact load `(f, phi_j)` for `u = 1 - x^2` on `(-1, 1)`, evaluated from
/// `-[(dL^{2s-1} phi_j, u') + (dL^{2s-1} u, phi_j')] / (2 cos(s pi))`.
pub fn rl_load_1d(mesh: &Mesh, s: f64) -> Result<Vec<f64>> {
    check_rl_order(s)?;
    let x = interval_knots(mesh)?;
    let n = x.len() - 2;
    let mu = 2.0 * s - 1.0;
    let q = 1.0 - mu;
    let g2 = gamma(2.0 - mu)?;
    let g3 = gamma(3.0 - mu)?;
    // int_a^1 (y - a)^q y dy
    let moment = |a: f64| (1.0 - a).powf(q + 2.0) / (q + 2.0) + a * (1.0 - a).powf(q + 1.0) / (q + 1.0);
    // antiderivative of dL^mu u in w = y + 1
    let prim = |y: f64| {
        let w = y + 1.0;
        2.0 * w.powf(q + 1.0) / ((q + 1.0) * g2) - 2.0 * w.powf(q + 2.0) / ((q + 2.0) * g3)
    };
    let denom = 2.0 * (s * PI).cos();
    Ok((0..n)
        .map(|i| {
            let (hl, hr) = (x[i + 1] - x[i], x[i + 2] - x[i + 1]);
            let jumps = [(x[i], 1.0 / hl), (x[i + 1], -1.0 / hl - 1.0 / hr), (x[i + 2], 1.0 / hr)];
            let t1: f64 = jumps.iter().map(|&(a, alpha)| -2.0 * alpha * moment(a) / g2).sum();
            let t2 = (prim(x[i + 1]) - prim(x[i])) / hl - (prim(x[i + 2]) - prim(x[i + 1])) / hr;
            -(t1 + t2) / denom
        })
        .collect())
}

/// Stiffness entry `a(phi_0, phi_m)` of the uniform mesh of size `h` on the
/// whole line, from the Fourier representation of the form.
pub fn toeplitz_entry(s: f64, h: f64, m: i64) -> Result<f64> {
    check_rl_order(s)?;
    let p = 2.0 * s - 3.0;
    let k = gamma(p)? * (PI * p / 2.0).cos() / PI;
    let c = [1.0, -4.0, 6.0, -4.0, 1.0];
    let sum: f64 = (-2..=2).zip(c).map(|(j, cj)| cj * ((m + j).abs() as f64).powf(-p)).sum();
    Ok(k * h.powf(1.0 - 2.0 * s) * sum)
}
