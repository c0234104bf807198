//! Execution mode for the data-parallel loops.
//!
//! Every parallel map in the crate collects results in input order, so the
//! output is identical whichever mode runs it. Without the `parallel`
//! feature, [`Execution::Parallel`] silently runs sequentially.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

static MODE: AtomicU8 = AtomicU8::new(1);

/// Sets the process-wide execution mode.
pub fn set_execution(mode: Execution) {
    MODE.store(mode as u8, Ordering::Relaxed);
}

pub fn execution() -> Execution {
    match MODE.load(Ordering::Relaxed) {
        0 => Execution::Sequential,
        _ => Execution::Parallel,
    }
}

/// True when loops will actually fan out to the rayon pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && execution() == Execution::Parallel
}

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_indices<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

/// Maps `f` over a slice, returning results in slice order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}
