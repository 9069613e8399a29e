//! Gamma function wrappers and the Gauss hypergeometric function on `[0, 1]`.

use statrs::function::gamma as sg;

use crate::error::{Error, Result};

const SERIES_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 100_000;

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ(x). Fails at the poles `x = 0, -1, -2, ...`.
pub fn gamma(x: f64) -> Result<f64> {
    if is_pole(x) || !x.is_finite() {
        return Err(Error::Evaluation(format!("gamma has a pole at {x}")));
    }
    Ok(sg::gamma(x))
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if is_pole(x) || !x.is_finite() {
        return Err(Error::Evaluation(format!("gamma has a pole at {x}")));
    }
    if x >= 0.5 {
        Ok(sg::ln_gamma(x))
    } else {
        Ok(sg::gamma(x).abs().ln())
    }
}

/// ψ(x) = Γ'(x)/Γ(x).
pub fn digamma(x: f64) -> Result<f64> {
    if is_pole(x) || !x.is_finite() {
        return Err(Error::Evaluation(format!("digamma has a pole at {x}")));
    }
    Ok(sg::digamma(x))
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        0.0
    } else {
        1.0 / sg::gamma(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

/// Plain Maclaurin series, used for `|z| <= 1/2` and inside the transforms.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= SERIES_TOL * sum.abs() {
            quiet += 1;
            if quiet == 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Evaluation(format!("2F1 series did not converge for a={a}, b={b}, c={c}, z={z}")))
}

/// `2F1(a, b; a+b; z)` near `z = 1`, where the linear transformation degenerates
/// and a logarithm appears.
fn log_case(a: f64, b: f64, w: f64) -> Result<f64> {
    let pref = gamma(a + b)? * rgamma(a) * rgamma(b);
    let lw = w.ln();
    let mut coef = 1.0;
    let mut sum = 0.0;
    let mut wn = 1.0;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let bracket = 2.0 * digamma(nf + 1.0)? - digamma(a + nf)? - digamma(b + nf)? - lw;
        let term = coef * bracket * wn;
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs() {
            quiet += 1;
            if quiet == 2 {
                return Ok(pref * sum);
            }
        } else {
            quiet = 0;
        }
        coef *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0));
        wn *= w;
    }
    Err(Error::Evaluation("2F1 logarithmic expansion did not converge".into()))
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z` in `[0, 1]`.
///
/// At `z = 1` the value exists only when `c - a - b > 0`; otherwise an
/// evaluation error is returned.
pub fn hyp2f1(p: Hyp2F1Params) -> Result<f64> {
    let Hyp2F1Params { a, b, c, z } = p;
    if is_pole(c) {
        return Err(Error::Evaluation(format!("2F1 undefined for c={c}")));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Evaluation(format!("2F1 argument {z} outside [0,1]")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let m = c - a - b;
    if z == 1.0 {
        if m > 0.0 {
            return Ok(gamma(c)? * gamma(m)? * rgamma(c - a) * rgamma(c - b));
        }
        return Err(Error::Evaluation(format!("2F1 diverges at z=1 (c-a-b={m})")));
    }
    if z <= 0.5 {
        return series(a, b, c, z);
    }
    let w = 1.0 - z;
    if m.abs() < 1e-13 {
        return log_case(a, b, w);
    }
    if (m - m.round()).abs() < 1e-13 {
        return Err(Error::Evaluation(format!("2F1 with integer c-a-b={m} is not supported")));
    }
    let g_c = gamma(c)?;
    let first = g_c * gamma(m)? * rgamma(c - a) * rgamma(c - b);
    let second = g_c * gamma(-m)? * rgamma(a) * rgamma(b);
    let mut value = 0.0;
    if first != 0.0 {
        value += first * series(a, b, 1.0 - m, w)?;
    }
    if second != 0.0 {
        value += second * w.powf(m) * series(c - a, c - b, m + 1.0, w)?;
    }
    Ok(value)
}
