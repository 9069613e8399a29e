use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::mesh::DEFAULT_HALF_WIDTH;
use crate::parallel::Execution;
use crate::sinc::{check_order, default_delta, QuadratureScheme, DEFAULT_BAND};

/// How the load vector is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsMode {
    /// `(f, phi_j)` by Gauss quadrature.
    Projected,
    /// Closed-form Riemann–Liouville load (1D smooth problem only).
    ExactRl,
}

impl FromStr for RhsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projected" => Ok(Self::Projected),
            "exact-rl" | "exact_rl" => Ok(Self::ExactRl),
            _ => domain(format!("unknown rhs mode `{s}` (expected projected or exact-rl)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub dim: usize,
    pub s: f64,
    pub k: f64,
    /// Truncation parameter.
    pub m: f64,
    pub d: f64,
    /// Defaults to `min(2 - s, 3/2)`.
    pub delta: Option<f64>,
    /// 1D: `h = 2^-level`; 2D: number of refinements of the coarse disk.
    pub level: u32,
    pub tol: f64,
    pub max_iter: usize,
    pub load_order: usize,
    pub error_order: usize,
    pub rhs: RhsMode,
    /// DST (1D) or Jacobi (2D) preconditioning of the outer iteration.
    pub precondition: bool,
    pub execution: Execution,
    /// Half-width of the central square of the disk mesh.
    pub half_width: f64,
    /// Explicit node counts; both must be given to bypass the balanced choice.
    pub n_minus: Option<i64>,
    pub n_plus: Option<i64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            s: 0.5,
            k: 0.25,
            m: 4.0,
            d: DEFAULT_BAND,
            delta: None,
            level: 6,
            tol: 1e-10,
            max_iter: 2000,
            load_order: 6,
            error_order: 10,
            rhs: RhsMode::Projected,
            precondition: true,
            execution: Execution::default(),
            half_width: DEFAULT_HALF_WIDTH,
            n_minus: None,
            n_plus: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Domain(format!("invalid value `{value}` for `{key}`")))
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        check_order(self.s)?;
        if self.dim != 1 && self.dim != 2 {
            return domain(format!("dimension must be 1 or 2, got {}", self.dim));
        }
        if !(self.m > 0.0) {
            return domain(format!("truncation parameter M must be positive, got {}", self.m));
        }
        if !(self.tol > 0.0) {
            return domain(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.load_order < 1 || self.error_order < 1 {
            return domain("quadrature orders must be at least 1");
        }
        if self.dim == 1 && self.level == 0 {
            return domain("1D level must be at least 1 (h = 1/2)");
        }
        if self.n_minus.is_some() != self.n_plus.is_some() {
            return domain("explicit node counts need both n_minus and n_plus");
        }
        self.scheme().map(|_| ())
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| default_delta(self.s))
    }

    pub fn scheme(&self) -> Result<QuadratureScheme> {
        match (self.n_minus, self.n_plus) {
            (Some(nm), Some(np)) => QuadratureScheme::build_explicit(self.s, self.k, nm, np, self.d),
            _ => QuadratureScheme::build_balanced(self.s, self.k, self.d, self.delta()),
        }
    }

    /// Mesh size of the 1D mesh, or the nominal size of the 2D mesh.
    pub fn h(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    /// Sets one `key=value` option. Keys: s, k, M, d, delta, level, tol,
    /// max_iter, load_order, error_order, rhs, precondition, dim, half_width, n_minus,
    /// n_plus, execution (sequential|parallel).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "s" => self.s = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "M" | "m" => self.m = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "delta" => self.delta = Some(parse(key, value)?),
            "level" | "h_level" | "h-level" => self.level = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "max_iter" => self.max_iter = parse(key, value)?,
            "load_order" | "quad_order" => self.load_order = parse(key, value)?,
            "error_order" => self.error_order = parse(key, value)?,
            "rhs" => self.rhs = value.trim().parse()?,
            "precondition" => self.precondition = parse(key, value)?,
            "dim" => self.dim = parse(key, value)?,
            "half_width" => self.half_width = parse(key, value)?,
            "n_minus" => self.n_minus = Some(parse(key, value)?),
            "n_plus" => self.n_plus = Some(parse(key, value)?),
            "execution" => {
                self.execution = match value.trim() {
                    "sequential" => Execution::Sequential,
                    "parallel" => Execution::Parallel,
                    other => return domain(format!("unknown execution policy `{other}`")),
                }
            }
            other => return domain(format!("unknown configuration key `{other}`")),
        }
        Ok(())
    }
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("config line {}: expected key=value, got `{raw}`", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
