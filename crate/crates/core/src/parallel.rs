//! Worker pool shared by the data-parallel scans.
//!
//! Work is always split into a fixed, input-determined list of partitions and
//! the partial results are merged in partition order, so the thread count
//! never changes a result.

use std::sync::OnceLock;

use rayon::prelude::*;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "THERMOSHIFT_THREADS";

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

fn configured_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

pub fn pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(configured_threads())
            .thread_name(|i| format!("thermoshift-{i}"))
            .build()
            .expect("failed to build worker pool")
    })
}

pub fn threads() -> usize {
    pool().current_num_threads()
}

/// Map `f` over `items` on the pool; output order equals input order.
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if items.len() <= 1 || threads() == 1 {
        return items.iter().map(f).collect();
    }
    pool().install(|| items.par_iter().map(f).collect())
}
