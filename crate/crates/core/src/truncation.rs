//! Dilated truncation domains.
//!
//! Each shifted elliptic problem attached to a quadrature node with scale `t`
//! is posed on the ball of radius `gamma(t)` (the base domain has radius 1),
//! with `gamma(t) = 1 + t(1 + M)` for `t >= 1` and `2 + M` otherwise.

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    /// Truncation parameter `M > 0`.
    pub m: f64,
    /// Radius of the base domain. Always 1 here; the physical domain is the base domain.
    pub base_radius: f64,
}

impl TruncationSpec {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return domain(format!("truncation parameter M must be positive, got {m}"));
        }
        Ok(Self { m, base_radius: 1.0 })
    }

    /// Dilation factor of the truncated domain for node scale `t`.
    pub fn dilation_factor(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("node scale must be positive, got {t}"));
        }
        Ok(if t >= 1.0 {
            1.0 + t * (1.0 + self.m)
        } else {
            2.0 + self.m
        })
    }
}
