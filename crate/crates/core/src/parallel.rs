//! Deterministic chunked map-reduce with a sequential fallback.
//!
//! Work is cut into fixed chunks before any thread sees it, and partial
//! results are combined in chunk order, so the output depends only on the
//! inputs and not on [`Execution`] or the thread count.

use serde::{Deserialize, Serialize};

/// How data-parallel loops run. `Parallel` silently runs sequentially when the
/// crate is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps each chunk `[k*chunk, min((k+1)*chunk, n))` of `0..n` and reduces the
/// results left to right.
pub fn map_reduce_range<T, M, R>(
    n: u64,
    chunk: u64,
    exec: Execution,
    map: M,
    reduce: R,
) -> Option<T>
where
    T: Send,
    M: Fn(std::ops::Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = n.div_ceil(chunk);
    let range_of = |k: u64| k * chunk..((k + 1) * chunk).min(n);
    map_reduce_indices(chunks, exec, |k| map(range_of(k)), reduce)
}

/// Maps every item of `items` and reduces the results in slice order.
pub fn map_reduce_slice<I, T, M, R>(items: &[I], exec: Execution, map: M, reduce: R) -> Option<T>
where
    I: Sync,
    T: Send,
    M: Fn(&I) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    map_reduce_indices(
        items.len() as u64,
        exec,
        |k| map(&items[k as usize]),
        reduce,
    )
}

fn map_reduce_indices<T, M, R>(count: u64, exec: Execution, map: M, reduce: R) -> Option<T>
where
    T: Send,
    M: Fn(u64) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        // rayon's reduce keeps the left-to-right order of the pieces it joins.
        return (0..count).into_par_iter().map(map).reduce_with(reduce);
    }
    let _ = exec;
    (0..count).map(map).reduce(reduce)
}
