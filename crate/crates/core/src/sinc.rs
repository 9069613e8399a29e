//! Sinc quadrature for the integral representation of the fractional form.
//!
//! After the substitution `t^{-2} = e^y` the form becomes an integral over the
//! real line, which is approximated by the trapezoidal rule with spacing `k`
//! on the nodes `y_j = j k`, `j = -N⁻..=N⁺`.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Default strip half-width of the analyticity region.
pub const DEFAULT_BAND: f64 = PI / 4.0;

/// Normalization constant `c_s = 2 sin(pi s) / pi`.
pub fn c_s(s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(2.0 * (PI * s).sin() / PI)
}

/// Largest admissible regularity pivot, `min(2 - s, 3/2)`.
pub fn default_delta(s: f64) -> f64 {
    (2.0 - s).min(1.5)
}

pub(crate) fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("fractional order must lie in (0,1), got {s}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureNode {
    pub j: i64,
    /// `y_j = j k`.
    pub y: f64,
    /// `t_j = exp(-y_j / 2)`.
    pub t: f64,
}

/// Nodes and weights of the sinc rule. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureScheme {
    pub s: f64,
    pub k: f64,
    pub d: f64,
    /// Regularity pivot, `None` for schemes built with explicit counts.
    pub delta: Option<f64>,
    pub n_minus: usize,
    pub n_plus: usize,
    /// Ordered by increasing `j`, i.e. largest `t` first.
    pub nodes: Vec<QuadratureNode>,
    /// `c_s k / 2 = sin(pi s) k / pi`.
    pub weight_prefactor: f64,
}

impl QuadratureScheme {
    /// Node counts chosen so that the three exponential error terms balance:
    /// `N⁺ = ceil(4 pi d / (k² (delta - s)))`, `N⁻ = ceil(2 pi d / (s k²))`.
    pub fn build_balanced(s: f64, k: f64, d: f64, delta: f64) -> Result<Self> {
        check_order(s)?;
        check_spacing(k, d)?;
        if !(delta > s && delta <= default_delta(s) + 1e-15) {
            return domain(format!(
                "regularity pivot must satisfy s < delta <= min(2-s, 3/2), got delta={delta} for s={s}"
            ));
        }
        let n_plus = (4.0 * PI * d / (k * k * (delta - s))).ceil() as usize;
        let n_minus = (2.0 * PI * d / (s * k * k)).ceil() as usize;
        let mut scheme = Self::assemble(s, k, d, n_minus, n_plus);
        scheme.delta = Some(delta);
        Ok(scheme)
    }

    /// Scheme with user supplied node counts.
    pub fn build_explicit(s: f64, k: f64, n_minus: i64, n_plus: i64, d: f64) -> Result<Self> {
        check_order(s)?;
        check_spacing(k, d)?;
        if n_minus < 0 || n_plus < 0 {
            return domain(format!("node counts must be nonnegative, got N-={n_minus}, N+={n_plus}"));
        }
        Ok(Self::assemble(s, k, d, n_minus as usize, n_plus as usize))
    }

    fn assemble(s: f64, k: f64, d: f64, n_minus: usize, n_plus: usize) -> Self {
        let nodes = (-(n_minus as i64)..=n_plus as i64)
            .map(|j| {
                let y = j as f64 * k;
                QuadratureNode { j, y, t: (-y / 2.0).exp() }
            })
            .collect();
        Self {
            s,
            k,
            d,
            delta: None,
            n_minus,
            n_plus,
            nodes,
            weight_prefactor: (PI * s).sin() * k / PI,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Full weight `c_s k / 2 * exp(s y_j)` of a node.
    pub fn weight(&self, node: &QuadratureNode) -> f64 {
        self.weight_prefactor * (self.s * node.y).exp()
    }
}

fn check_spacing(k: f64, d: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("quadrature spacing must be positive, got {k}"));
    }
    if !(d > 0.0 && d < PI) {
        return domain(format!("band half-width must lie in (0, pi), got {d}"));
    }
    Ok(())
}
