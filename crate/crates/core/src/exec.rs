//! Data-parallel helpers with a sequential fallback. Output order never
//! depends on the execution strategy.

use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Parallel when the `parallel` feature is enabled.
    #[default]
    Auto,
    Sequential,
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Execution::Sequential
    }
}

/// Maps `f` over `0..n`, results in index order.
pub(crate) fn map_range<R, F>(n: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Applies `f` to consecutive chunks of `items`, concatenating what each
/// chunk pushes, in order.
pub(crate) fn chunked_collect<T, R, F>(items: &[T], chunk: usize, exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T], &mut Vec<R>) + Sync + Send,
{
    let run = |c: &[T]| {
        let mut out = Vec::new();
        f(c, &mut out);
        out
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        let parts: Vec<Vec<R>> = items.par_chunks(chunk.max(1)).map(run).collect();
        return parts.into_iter().flatten().collect();
    }
    let _ = exec;
    items.chunks(chunk.max(1)).flat_map(run).collect()
}

/// Calls `f(row_index, row)` on each `width`-sized row of `data`.
pub(crate) fn for_each_row<T, F>(data: &mut [T], width: usize, exec: Execution, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(width)
            .enumerate()
            .with_min_len(1024)
            .for_each(|(i, row)| f(i, row));
        return;
    }
    let _ = exec;
    data.chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
}
