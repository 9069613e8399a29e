use crate::error::{Error, Result};

/// `L D L^T` factorization of a symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagFactor {
    d: Vec<f64>,
    /// Subdiagonal of the unit lower factor, `l[i]` couples rows `i` and `i+1`.
    l: Vec<f64>,
}

impl TridiagFactor {
    /// Factors the matrix with diagonal `diag` and off-diagonal `off`.
    pub fn new(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off.len() + 1 != n {
            return Err(Error::Domain(format!("tridiagonal shape mismatch: {} diagonal, {} off-diagonal", n, off.len())));
        }
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n - 1);
        d.push(diag[0]);
        for i in 1..n {
            let li = off[i - 1] / d[i - 1];
            l.push(li);
            d.push(diag[i] - li * off[i - 1]);
        }
        if let Some(i) = d.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NotSpd(format!("tridiagonal pivot {i} is {:e}", d[i])));
        }
        Ok(Self { d, l })
    }

    /// Factors the matrix with off-diagonal `off` and diagonal
    /// `excess[i] + |off[i-1]| + |off[i]|`.
    ///
    /// For nearly singular diagonally dominant matrices the row-sum excess is
    /// known far more accurately than the diagonal; working with it keeps every
    /// pivot free of cancellation.
    pub fn from_excess(excess: &[f64], off: &[f64]) -> Result<Self> {
        let n = excess.len();
        if n == 0 || off.len() + 1 != n {
            return Err(Error::Domain(format!("tridiagonal shape mismatch: {} diagonal, {} off-diagonal", n, off.len())));
        }
        if let Some(i) = excess.iter().position(|&e| !(e >= 0.0)) {
            return Err(Error::NotSpd(format!("negative row excess {:e} in row {i}", excess[i])));
        }
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n - 1);
        let mut g = excess[0];
        for i in 0..n {
            if i > 0 {
                let b = off[i - 1].abs();
                g = excess[i] + b * (g / d[i - 1]);
            }
            let next = if i + 1 < n { off[i].abs() } else { 0.0 };
            d.push(g + next);
            if i + 1 < n {
                l.push(off[i] / d[i]);
            }
        }
        if let Some(i) = d.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NotSpd(format!("tridiagonal pivot {i} is {:e}", d[i])));
        }
        Ok(Self { d, l })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Direct solve of a symmetric positive definite tridiagonal system.
pub fn tridiag_solve(diag: &[f64], off: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    Ok(TridiagFactor::new(diag, off)?.solve(b))
}
