//! Execution policy for the data-parallel loops over quadrature nodes.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] dispatches
//! to rayon; without it every policy runs sequentially. Results are always
//! produced in input order, so reductions performed by the caller are
//! independent of scheduling.

/// How node-wise work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread over a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Sums the vectors produced by `f` over `items` in a fixed order.
///
/// Items are grouped in chunks of `chunk` consecutive entries; each chunk is
/// accumulated sequentially and the chunk sums are then added in order, so the
/// floating point result is bit-identical for both execution policies.
pub fn sum_vectors<T, F>(exec: Execution, items: &[T], len: usize, chunk: usize, f: F) -> Vec<f64>
where
    T: Sync,
    F: Fn(&T, &mut Vec<f64>) + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks: Vec<&[T]> = items.chunks(chunk).collect();
    let partial = map(exec, &chunks, |group| {
        let mut acc = vec![0.0; len];
        for item in group.iter() {
            f(item, &mut acc);
        }
        acc
    });
    let mut out = vec![0.0; len];
    for p in partial {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<usize> = (0..100).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let ys = map(exec, &xs, |x| x * 2);
            assert_eq!(ys, xs.iter().map(|x| x * 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn sums_are_bit_identical_across_policies() {
        let xs: Vec<f64> = (0..257).map(|i| (i as f64 * 0.37).sin() * 1e3_f64.powi(i % 5)).collect();
        let run = |exec| {
            sum_vectors(exec, &xs, 3, 7, |x, acc: &mut Vec<f64>| {
                acc[0] += x;
                acc[1] += x * x;
                acc[2] += x.cos();
            })
        };
        let a = run(Execution::Sequential);
        let b = run(Execution::Parallel);
        assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
