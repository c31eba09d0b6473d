//! Worker pools for range scans.
//!
//! Library scans split their input into fixed-size chunks that do not depend
//! on the worker count, map them in parallel and concatenate in chunk order,
//! so results are identical for any number of workers.

use rayon::prelude::*;

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "QFIB_WORKERS";

/// `QFIB_WORKERS` if set and positive, otherwise the number of CPUs.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Maps `f` over `items` on a dedicated pool of `workers` threads, keeping
/// input order.
pub fn ordered_map<I, T, F>(workers: usize, items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Send + Sync,
{
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| items.into_par_iter().map(f).collect())
}
