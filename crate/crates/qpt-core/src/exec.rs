//! Execution strategy for batch operations.
//!
//! Batch work (trace generation, bootstrap resampling, sweep fitting) is
//! embarrassingly parallel over independent indices. Each work item derives
//! its randomness from `(master seed, index)`, so results are identical for
//! both strategies and independent of scheduling order. The `parallel`
//! feature gates the rayon dependency; without it only [`Exec::Serial`]
//! exists and dispatch degrades to a plain loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch operation distributes its work items.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    /// Single-threaded loop.
    Serial,
    /// Data-parallel via the rayon thread pool.
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Exec::Parallel
    }

    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Exec::Serial
    }
}

/// Map `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Exec::Serial => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_preserves_order() {
        let v = map_indexed(Exec::Serial, 5, |i| i * i);
        assert_eq!(v, vec![0, 1, 4, 9, 16]);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_serial() {
        let a = map_indexed(Exec::Serial, 1000, |i| i as u64 * 7 + 3);
        let b = map_indexed(Exec::Parallel, 1000, |i| i as u64 * 7 + 3);
        assert_eq!(a, b);
    }
}
