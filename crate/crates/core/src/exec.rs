//! Sequential / data-parallel execution switch.
//!
//! Every hot loop in the crate (gate application, dense matrix products,
//! amplitude reductions) is written once over disjoint chunks and dispatched
//! through [`Exec`]. With the `parallel` feature enabled, [`Exec::Parallel`]
//! runs the chunks on the rayon pool; without it both variants run on the
//! calling thread, so callers never need their own `cfg` gates.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements the parallel path is not worth the fork/join cost.
pub const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    #[cfg(feature = "parallel")]
    fn use_parallel(self, len: usize) -> bool {
        self == Exec::Parallel && len >= PARALLEL_THRESHOLD
    }

    #[cfg(feature = "parallel")]
    fn use_parallel_tasks(self, tasks: usize) -> bool {
        self == Exec::Parallel && tasks > 1
    }

    /// Calls `f(chunk_index, chunk)` for every `chunk_len`-sized chunk of `data`.
    pub fn for_each_chunk<T, F>(self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.use_parallel(data.len()) {
            data.par_chunks_mut(chunk_len)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }

    /// Sums `f(i)` over `0..len`.
    ///
    /// Partial sums are taken over fixed blocks and combined in block order, so
    /// the rounding is identical in both modes and across thread counts.
    pub fn sum<F>(self, len: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Send + Sync,
    {
        const BLOCK: usize = 4096;
        let blocks = len.div_ceil(BLOCK);
        self.map_collect(blocks, |b| {
            (b * BLOCK..((b + 1) * BLOCK).min(len)).map(&f).sum::<f64>()
        })
        .into_iter()
        .sum()
    }

    /// Maps `0..len` through `f`, preserving order.
    pub fn map_collect<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.use_parallel_tasks(len) {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let n = PARALLEL_THRESHOLD * 2;
        for exec in [Exec::Sequential, Exec::Parallel] {
            let mut v = vec![0usize; n];
            exec.for_each_chunk(&mut v, 64, |ci, c| {
                for (j, x) in c.iter_mut().enumerate() {
                    *x = ci * 64 + j;
                }
            });
            assert!(v.iter().enumerate().all(|(i, &x)| i == x));
            let s = exec.sum(n, |i| i as f64);
            assert_eq!(s, (n * (n - 1) / 2) as f64);
            assert_eq!(exec.map_collect(5, |i| i * 2), vec![0, 2, 4, 6, 8]);
        }
    }
}
