//! Deterministic parallel map: results come back in input order regardless
//! of completion order, so outputs do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{PslError, Result};

pub fn par_map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Runs `f` on a dedicated pool of `threads` workers (`0` = rayon default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PslError::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
