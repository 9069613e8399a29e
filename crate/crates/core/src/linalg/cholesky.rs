//! Simplicial up-looking sparse Cholesky `P A P^T = L L^T`.
//!
//! The symbolic analysis (ordering, elimination tree, pattern of `L`) depends
//! only on the sparsity pattern, so it is computed once and shared by all
//! numeric factorizations of matrices with that pattern.

use std::sync::Arc;

use super::ordering::{adjacency, invert, reverse_cuthill_mckee};
use crate::error::{Error, Result};
use crate::fem::SparseMatrix;

#[derive(Debug, Clone)]
pub struct SymbolicCholesky {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// Upper triangle of the permuted matrix by columns: rows and positions
    /// into the value array of the source pattern.
    up_ptr: Vec<usize>,
    up_row: Vec<usize>,
    up_src: Vec<usize>,
    source_nnz: usize,
    /// Row patterns of `L` in topological order.
    reach_ptr: Vec<usize>,
    reach: Vec<usize>,
    /// Columns of `L`, diagonal first.
    l_ptr: Vec<usize>,
    l_row: Vec<usize>,
}

fn etree(n: usize, up_ptr: &[usize], up_row: &[usize]) -> Vec<usize> {
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for k in 0..n {
        for &row in &up_row[up_ptr[k]..up_ptr[k + 1]] {
            let mut i = row;
            while i != usize::MAX && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == usize::MAX {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

impl SymbolicCholesky {
    /// Analyses the pattern of `a` (both triangles stored) under `perm`.
    pub fn new(a: &SparseMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.n();
        if perm.len() != n {
            return Err(Error::Domain(format!("ordering has length {}, matrix has {n} rows", perm.len())));
        }
        let inv = invert(&perm);
        let mut cols: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = a.row_ptr()[i]..a.row_ptr()[i + 1];
            for (p, &j) in r.clone().zip(&a.col_idx()[r]) {
                let (ni, nj) = (inv[i], inv[j]);
                if ni <= nj {
                    cols[nj].push((ni, p));
                }
            }
        }
        let mut up_ptr = vec![0];
        let mut up_row = Vec::new();
        let mut up_src = Vec::new();
        for c in &mut cols {
            c.sort();
            up_row.extend(c.iter().map(|e| e.0));
            up_src.extend(c.iter().map(|e| e.1));
            up_ptr.push(up_row.len());
        }
        let parent = etree(n, &up_ptr, &up_row);

        let mut reach_ptr = vec![0];
        let mut reach = Vec::new();
        let mut flag = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut counts = vec![1usize; n];
        for k in 0..n {
            flag[k] = k;
            let start = reach.len();
            for &row in &up_row[up_ptr[k]..up_ptr[k + 1]] {
                let mut i = row;
                stack.clear();
                while flag[i] != k {
                    stack.push(i);
                    flag[i] = k;
                    i = parent[i];
                }
                // path from the leaf upwards, emitted root-most last
                while let Some(v) = stack.pop() {
                    reach.push(v);
                }
            }
            // ereach order: reverse the accumulation so ancestors follow descendants
            reach[start..].reverse();
            for &j in &reach[start..] {
                counts[j] += 1;
            }
            reach_ptr.push(reach.len());
        }
        let mut l_ptr = vec![0usize; n + 1];
        for j in 0..n {
            l_ptr[j + 1] = l_ptr[j] + counts[j];
        }
        let mut l_row = vec![0usize; l_ptr[n]];
        let mut fill: Vec<usize> = l_ptr[..n].to_vec();
        for k in 0..n {
            l_row[fill[k]] = k;
            fill[k] += 1;
            for &j in &reach[reach_ptr[k]..reach_ptr[k + 1]] {
                l_row[fill[j]] = k;
                fill[j] += 1;
            }
        }
        Ok(Self { n, perm, up_ptr, up_row, up_src, source_nnz: a.nnz(), reach_ptr, reach, l_ptr, l_row })
    }

    /// Analysis with a reverse Cuthill–McKee ordering.
    pub fn with_rcm(a: &SparseMatrix) -> Result<Self> {
        Self::new(a, reverse_cuthill_mckee(&adjacency(a)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries of `L`.
    pub fn factor_nnz(&self) -> usize {
        self.l_row.len()
    }
}

/// Numeric factor sharing its symbolic analysis.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    symbolic: Arc<SymbolicCholesky>,
    l_val: Vec<f64>,
}

impl CholeskyFactor {
    /// Factors the matrix whose entries are `values`, laid out on the pattern
    /// the symbolic analysis was built from.
    pub fn new(symbolic: Arc<SymbolicCholesky>, values: &[f64]) -> Result<Self> {
        let s = &*symbolic;
        if values.len() != s.source_nnz {
            return Err(Error::Domain(format!("expected {} values, got {}", s.source_nnz, values.len())));
        }
        let n = s.n;
        let mut l_val = vec![0.0; s.l_row.len()];
        let mut fill: Vec<usize> = s.l_ptr[..n].to_vec();
        let mut x = vec![0.0; n];
        for k in 0..n {
            for p in s.up_ptr[k]..s.up_ptr[k + 1] {
                x[s.up_row[p]] += values[s.up_src[p]];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &j in &s.reach[s.reach_ptr[k]..s.reach_ptr[k + 1]] {
                let lkj = x[j] / l_val[s.l_ptr[j]];
                x[j] = 0.0;
                for p in s.l_ptr[j] + 1..fill[j] {
                    x[s.l_row[p]] -= l_val[p] * lkj;
                }
                d -= lkj * lkj;
                l_val[fill[j]] = lkj;
                fill[j] += 1;
            }
            if !(d > 0.0) {
                return Err(Error::NotSpd(format!("non-positive pivot {d:e} in column {k}")));
            }
            l_val[s.l_ptr[k]] = d.sqrt();
            fill[k] += 1;
        }
        Ok(Self { symbolic, l_val })
    }

    /// Analysis with reverse Cuthill–McKee followed by factorization.
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let sym = Arc::new(SymbolicCholesky::with_rcm(a)?);
        Self::new(sym, a.values())
    }

    pub fn symbolic(&self) -> &Arc<SymbolicCholesky> {
        &self.symbolic
    }

    pub fn solve_in_place(&self, b: &mut [f64], work: &mut Vec<f64>) {
        let s = &*self.symbolic;
        work.clear();
        work.extend(s.perm.iter().map(|&old| b[old]));
        let (lp, li, lx) = (&s.l_ptr, &s.l_row, &self.l_val);
        for j in 0..s.n {
            let xj = work[j] / lx[lp[j]];
            work[j] = xj;
            for p in lp[j] + 1..lp[j + 1] {
                work[li[p]] -= lx[p] * xj;
            }
        }
        for j in (0..s.n).rev() {
            let mut xj = work[j];
            for p in lp[j] + 1..lp[j + 1] {
                xj -= lx[p] * work[li[p]];
            }
            work[j] = xj / lx[lp[j]];
        }
        for (new, &old) in s.perm.iter().enumerate() {
            b[old] = work[new];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x, &mut Vec::new());
        x
    }

    /// Bytes held by the numeric values.
    pub fn value_bytes(&self) -> usize {
        self.l_val.len() * std::mem::size_of::<f64>()
    }
}

/// Factorization of a sparse SPD matrix.
pub fn sparse_cholesky(a: &SparseMatrix) -> Result<CholeskyFactor> {
    CholeskyFactor::factor(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble_pair;
    use crate::linalg::ordering::nested_dissection;
    use crate::mesh::{coarse_disk_mesh, DEFAULT_HALF_WIDTH};
    use crate::parallel::Execution;
    use rand::{Rng, SeedableRng};

    fn dense_cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut l = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut d = a[j][j];
            for k in 0..j {
                d -= l[j][k] * l[j][k];
            }
            l[j][j] = d.sqrt();
            for i in j + 1..n {
                let mut v = a[i][j];
                for k in 0..j {
                    v -= l[i][k] * l[j][k];
                }
                l[i][j] = v / l[j][j];
            }
        }
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[i][k] * y[k];
            }
            y[i] /= l[i][i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l[k][i] * y[k];
            }
            y[i] /= l[i][i];
        }
        y
    }

    #[test]
    fn identity_factor() {
        let f = sparse_cholesky(&SparseMatrix::identity(5)).unwrap();
        assert_eq!(f.symbolic().factor_nnz(), 5);
        assert_eq!(f.solve(&[1.0, 2.0, 3.0, 4.0, 5.0]), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn shifted_disk_system_matches_dense() {
        let mesh = coarse_disk_mesh(6.0, 4, DEFAULT_HALF_WIDTH).unwrap().refine().unwrap();
        let (m, a) = assemble_pair(&mesh, Execution::Sequential);
        assert!(m.n() <= 200);
        let shift = 1.7f64.exp();
        let vals: Vec<f64> = m.values().iter().zip(a.values()).map(|(x, y)| shift * x + y).collect();
        let k = m.with_values(vals);
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let b: Vec<f64> = (0..k.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let reference = dense_cholesky_solve(&k.to_dense(), &b);
        let pts: Vec<[f64; 2]> = mesh.dof_vertices().iter().map(|&v| mesh.vertices[v]).collect();
        let nodes: Vec<usize> = (0..k.n()).collect();
        for sym in [
            SymbolicCholesky::with_rcm(&k).unwrap(),
            SymbolicCholesky::new(&k, nested_dissection(&pts, &adjacency(&k), &nodes)).unwrap(),
        ] {
            let f = CholeskyFactor::new(Arc::new(sym), k.values()).unwrap();
            let x = f.solve(&b);
            assert!(x.iter().zip(&reference).all(|(p, q)| (p - q).abs() < 1e-10 * q.abs().max(1.0)));
            assert_eq!(f.solve(&b), x);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = SparseMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)], true);
        assert!(matches!(sparse_cholesky(&a), Err(Error::NotSpd(_))));
    }
}
