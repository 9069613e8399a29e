//! Elimination of the exterior of the truncated domain.
//!
//! The exterior meshes are tensor products: a radial chain of layers in 1D,
//! and layers of `m` congruent annular cells in 2D. The unknowns outside the
//! closed domain are eliminated exactly, leaving a boundary term that is added
//! to the matrix on the closed domain.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::fem::quad_matrices;
use crate::quadrature::Rule;

/// Exterior vertex coordinates `1 = p_0 < ... < p_L` (the last one Dirichlet)
/// of the graded chain used for node scale `gamma`.
pub fn graded_points(h: f64, m: f64, gamma: f64) -> Vec<f64> {
    let count = (m / h - 1e-9).ceil() as usize;
    let h0 = h * gamma.ln() / m;
    (0..=count).map(|i| if i == 0 { 1.0 } else { (i as f64 * h0).exp() }).collect()
}

/// Uniform exterior chain from 1 to `radius`.
pub fn uniform_points(h: f64, radius: f64) -> Vec<f64> {
    let count = ((radius - 1.0) / h - 1e-9).ceil() as usize;
    let step = (radius - 1.0) / count as f64;
    (0..=count).map(|i| if i == count { radius } else { 1.0 + i as f64 * step }).collect()
}

/// Schur complement of a symmetric tridiagonal chain on its first unknown.
///
/// `first` is the diagonal contribution of the first cell at the retained
/// unknown, `diag[i]` and `off[i]` describe the eliminated unknowns `1..` and
/// the coupling between unknowns `i` and `i + 1`.
fn chain_schur(first: f64, diag: &[f64], off: &[f64]) -> f64 {
    let mut s = f64::INFINITY;
    for i in (0..diag.len()).rev() {
        s = diag[i] - if s.is_finite() { off[i + 1] * off[i + 1] / s } else { 0.0 };
    }
    if diag.is_empty() {
        first
    } else {
        first - off[0] * off[0] / s
    }
}

/// Row-sum excess `kd - |ko|` of a segment of length `l` in `shift * M + A`.
pub fn segment_excess(l: f64, shift: f64) -> f64 {
    if shift * l * l <= 6.0 {
        shift * l / 2.0
    } else {
        shift * l / 6.0 + 2.0 / l
    }
}

/// Boundary scalar of the 1D exterior chain for `shift * M + A`.
///
/// Eliminates from the Dirichlet end inwards, carrying the row-sum excess of
/// each pivot so that tiny values (huge truncated domains) stay accurate.
pub fn interval_sigma(points: &[f64], shift: f64) -> f64 {
    let lens: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
    let ko: Vec<f64> = lens.iter().map(|&l| (shift * l / 6.0 - 1.0 / l).abs()).collect();
    let ex: Vec<f64> = lens.iter().map(|&l| segment_excess(l, shift)).collect();
    let last = lens.len() - 1;
    // excess of the pivot of unknown i after eliminating i+1..
    let mut g = f64::NAN;
    for i in (1..=last).rev() {
        g = if i == last { ex[i - 1] + ex[i] + ko[i] } else { ex[i - 1] + ex[i] + ko[i] * (g / (g + ko[i])) };
    }
    if last == 0 {
        ex[0] + ko[0]
    } else {
        ex[0] + ko[0] * (g / (g + ko[0]))
    }
}

/// Element matrices of the annular cells, one pair per layer.
#[derive(Debug, Clone)]
pub struct RingLayers {
    /// Number of cells per layer.
    pub m: usize,
    /// `(mass, stiffness)` with local order inner p, outer p, outer p+1, inner p+1.
    pub layers: Vec<([[f64; 4]; 4], [[f64; 4]; 4])>,
}

impl RingLayers {
    /// Layers with radii `gamma^(i/count)`, `i = 0..=count`.
    pub fn new(gamma: f64, count: usize, m: usize) -> Self {
        let rule = Rule::legendre(crate::fem::MATRIX_GAUSS).expect("fixed rule");
        let a0 = FRAC_PI_4;
        let a1 = FRAC_PI_4 + 2.0 * PI / m as f64;
        let (u0, u1) = ([a0.cos(), a0.sin()], [a1.cos(), a1.sin()]);
        let radius = |i: usize| if i == count { gamma } else { gamma.powf(i as f64 / count as f64) };
        let layers = (0..count)
            .map(|i| {
                let (ri, ro) = (if i == 0 { 1.0 } else { radius(i) }, radius(i + 1));
                let x = [[ri * u0[0], ri * u0[1]], [ro * u0[0], ro * u0[1]], [ro * u1[0], ro * u1[1]], [ri * u1[0], ri * u1[1]]];
                quad_matrices(&x, &rule)
            })
            .collect();
        Self { m, layers }
    }

    /// Symbol `sigma(omega)` of the condensed boundary operator of
    /// `shift * M + A` for the angular frequency `omega`.
    pub fn symbol(&self, shift: f64, omega: f64) -> f64 {
        let c = omega.cos();
        let k: Vec<[[f64; 4]; 4]> = self
            .layers
            .iter()
            .map(|(mm, aa)| {
                let mut k = [[0.0; 4]; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        k[i][j] = shift * mm[i][j] + aa[i][j];
                    }
                }
                k
            })
            .collect();
        let inner = |k: &[[f64; 4]; 4]| k[0][0] + k[3][3] + 2.0 * k[0][3] * c;
        let outer = |k: &[[f64; 4]; 4]| k[1][1] + k[2][2] + 2.0 * k[1][2] * c;
        let cross = |k: &[[f64; 4]; 4]| (k[0][1] + k[3][2]) + (k[0][2] + k[3][1]) * c;
        let diag: Vec<f64> = (1..k.len()).map(|i| outer(&k[i - 1]) + inner(&k[i])).collect();
        let off: Vec<f64> = k.iter().map(cross).collect();
        chain_schur(inner(&k[0]), &diag, &off)
    }

    /// First row `c_d = C[p, p + d]` of the circulant boundary matrix.
    pub fn circulant_row(&self, shift: f64) -> Vec<f64> {
        let m = self.m;
        let sigma: Vec<f64> = (0..m).map(|q| self.symbol(shift, 2.0 * PI * q as f64 / m as f64)).collect();
        (0..m)
            .map(|d| {
                sigma
                    .iter()
                    .enumerate()
                    .map(|(q, s)| s * (2.0 * PI * ((q * d) % m) as f64 / m as f64).cos())
                    .sum::<f64>()
                    / m as f64
            })
            .collect()
    }
}

/// Angular index of a point on the unit circle for `m` boundary vertices
/// starting at 45 degrees.
pub fn angular_index(p: [f64; 2], m: usize) -> usize {
    let theta = p[1].atan2(p[0]) - FRAC_PI_4;
    let step = 2.0 * PI / m as f64;
    ((theta / step).round() as i64).rem_euclid(m as i64) as usize
}
