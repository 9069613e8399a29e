use std::io::Write;

use crate::error::{Error, Result};

/// Square matrix in compressed row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    pub symmetric: bool,
}

impl SparseMatrix {
    /// Builds the matrix from `(row, col, value)` triplets; duplicates are summed
    /// in input order. Explicit zeros are kept in the pattern.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)], symmetric: bool) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut order = vec![0usize; triplets.len()];
        let mut next = counts.clone();
        for (t, &(i, _, _)) in triplets.iter().enumerate() {
            order[next[i]] = t;
            next[i] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            scratch.clear();
            scratch.extend(order[counts[i]..counts[i + 1]].iter().map(|&t| (triplets[t].1, triplets[t].2)));
            scratch.sort_by_key(|e| e.0);
            for &(j, v) in &scratch {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Self { n, row_ptr, col_idx, values, symmetric }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, &t, true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// Values of `self` laid out on the (larger) pattern of `pattern`.
    pub fn values_on(&self, pattern: &SparseMatrix) -> Result<Vec<f64>> {
        let mut out = vec![0.0; pattern.nnz()];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let r = pattern.row_ptr[i]..pattern.row_ptr[i + 1];
                let k = pattern.col_idx[r.clone()]
                    .binary_search(&j)
                    .map_err(|_| Error::Domain(format!("entry ({i},{j}) missing from target pattern")))?;
                out[r.start + k] = v;
            }
        }
        Ok(out)
    }

    /// Same pattern, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.nnz());
        Self { values, ..self.clone() }
    }

    /// Union of the patterns of `mats` with all values zero.
    pub fn union_pattern(n: usize, mats: &[&SparseMatrix]) -> Self {
        let t: Vec<_> = mats.iter().flat_map(|m| (0..m.n).flat_map(move |i| m.row(i).map(move |(j, _)| (i, j, 0.0)))).collect();
        Self::from_triplets(n, &t, mats.iter().all(|m| m.symmetric))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// Coordinate text export, one `i j value` line per stored entry (0-based).
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_sum_and_rows_sorted() {
        let m = SparseMatrix::from_triplets(3, &[(0, 2, 1.0), (0, 0, 2.0), (0, 2, 3.0), (2, 1, -1.0)], false);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 2), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![14.0, 0.0, -2.0]);
        assert_eq!(m.asymmetry(), 4.0);
    }

    #[test]
    fn pattern_union() {
        let a = SparseMatrix::from_triplets(2, &[(0, 0, 1.0)], true);
        let b = SparseMatrix::from_triplets(2, &[(0, 1, 2.0), (1, 0, 2.0)], true);
        let p = SparseMatrix::union_pattern(2, &[&a, &b]);
        assert_eq!(p.nnz(), 3);
        let va = a.values_on(&p).unwrap();
        assert_eq!(va, vec![1.0, 0.0, 0.0]);
        assert!(p.values_on(&a).is_err());
    }

    #[test]
    fn coordinate_export() {
        let mut buf = Vec::new();
        SparseMatrix::identity(2).write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("0 0 1.0"));
    }
}
