//! Task planning and a bounded worker pool for dataset generation.
//!
//! Generation is sharded per (image, corruption, level). Each task's output
//! depends only on its own key, so the pool size never changes results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::corruptions::CorruptionId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Task {
    /// Index into the caller's image list.
    pub image: usize,
    pub corruption: CorruptionId,
    pub level: u8,
}

/// All tasks in image-major, then corruption, then level order.
pub fn plan(n_images: usize, corruptions: &[CorruptionId], levels: &[u8]) -> Vec<Task> {
    let mut out = Vec::with_capacity(n_images * corruptions.len() * levels.len());
    for image in 0..n_images {
        for &corruption in corruptions {
            for &level in levels {
                out.push(Task {
                    image,
                    corruption,
                    level,
                });
            }
        }
    }
    out
}

/// Logical CPU count, at least 1.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Maps `f` over `items` on a pool of `jobs` workers (0 means
/// [`default_jobs`]), preserving order. Sequential when `jobs == 1` or
/// without the `parallel` feature.
pub fn run<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        let jobs = if jobs == 0 { default_jobs() } else { jobs };
        if jobs > 1 {
            match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => return pool.install(|| items.par_iter().map(&f).collect()),
                Err(e) => log::warn!("worker pool unavailable ({e}); running sequentially"),
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    items.iter().map(f).collect()
}
