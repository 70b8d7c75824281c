#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the data-parallel loops.
///
/// Every loop driven through `Exec` gives each row (or item) a single writer
/// and derives any randomness from the row/item index, so both strategies
/// produce bit-identical results. Without the `parallel` feature,
/// `Exec::Parallel` runs sequentially.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Calls `f(row_index, row)` for every `row_len`-sized chunk of `data`.
    pub fn for_each_row<T, F>(self, data: &mut [T], row_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            data.par_chunks_mut(row_len).enumerate().for_each(|(y, row)| f(y, row));
            return;
        }
        data.chunks_mut(row_len).enumerate().for_each(|(y, row)| f(y, row));
    }

    /// Order-preserving map.
    pub fn map<I, O, F>(self, items: &[I], f: F) -> Vec<O>
    where
        I: Sync,
        O: Send,
        F: Fn(&I) -> O + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}
