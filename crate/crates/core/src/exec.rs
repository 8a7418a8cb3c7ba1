//! Sequential / data-parallel execution of independent work items.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent Monte-Carlo work is scheduled. Results never depend on the
/// choice; without the `parallel` feature both variants run sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps every index in `range` and returns the results in index order.
pub(crate) fn map_indexed<T, F>(range: Range<u64>, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => range.into_par_iter().map(f).collect(),
        _ => range.map(f).collect(),
    }
}

/// Batch size for incremental work whose stopping point is found by a scan.
/// Sequential runs take one item at a time so nothing past the stop is wasted.
pub(crate) fn batch_hint(execution: Execution) -> u64 {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => 64 * rayon::current_num_threads() as u64,
        _ => 1,
    }
}
