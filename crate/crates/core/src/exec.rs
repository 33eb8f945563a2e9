//! Sequential and data-parallel execution of indexed reductions.
//!
//! All sampling loops in the crate are written as "map an index range, then
//! reduce in index order". The parallel path splits the range into fixed
//! chunks whose boundaries do not depend on the thread count, and combines the
//! chunk results left to right, so both paths agree bit for bit.

use std::ops::Range;

/// How sampling loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Map every index of `range` and collect the results in index order.
    pub fn map_collect<T, F>(self, range: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Map every index and fold the results in index order with `combine`.
    pub fn map_reduce<T, F, C>(self, range: Range<u64>, identity: T, f: F, combine: C) -> T
    where
        T: Send + Clone,
        F: Fn(u64) -> T + Sync + Send,
        C: Fn(T, T) -> T,
    {
        self.map_collect(range, f)
            .into_iter()
            .fold(identity, combine)
    }

    /// Returns true if `pred` holds for every index. Short-circuits on the
    /// sequential path only; the answer is the same either way.
    pub fn all<F>(self, range: Range<u64>, pred: F) -> bool
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().all(pred);
        }
        range.into_iter().all(pred)
    }
}
