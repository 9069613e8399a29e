//! Gauss rules on reference intervals, thin wrappers over `gauss-quad`.

use gauss_quad::{GaussJacobi, GaussLegendre};

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre rule with `n >= 1` points.
    pub fn legendre(n: usize) -> Result<Self> {
        if n == 1 {
            return Ok(Self { nodes: vec![0.0], weights: vec![2.0] });
        }
        let q = GaussLegendre::new(n).map_err(|e| Error::Domain(format!("Gauss-Legendre rule: {e}")))?;
        let (nodes, weights) = q.iter().map(|(x, w)| (*x, *w)).unzip();
        Ok(Self { nodes, weights })
    }

    /// Gauss–Jacobi rule for the weight `(1-x)^alpha (1+x)^beta`.
    ///
    /// Only even `n` is accepted: the upstream implementation pins the middle node
    /// of odd rules to zero, which is wrong for `alpha != beta`.
    pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::Domain(format!("Gauss-Jacobi rule needs an even point count, got {n}")));
        }
        let q = GaussJacobi::new(n, alpha, beta).map_err(|e| Error::Domain(format!("Gauss-Jacobi rule: {e}")))?;
        let (nodes, weights) = q.iter().map(|(x, w)| (*x, *w)).unzip();
        Ok(Self { nodes, weights })
    }

    /// Points and weights mapped to `[a, b]` (the weight function is not rescaled).
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
