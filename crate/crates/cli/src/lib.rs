//! Benchmark harness around the solver: dataset loading, seeded attribute
//! augmentation, experiment sweeps, and CSV reporting.

pub mod augment;
pub mod snap;
pub mod sweep;

/// Thread cap from RSHWC_THREADS, when set to a positive integer.
pub fn thread_cap_from_env() -> Option<usize> {
    std::env::var("RSHWC_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
}

/// Installs the global rayon pool honoring RSHWC_THREADS. Safe to call more
/// than once; later calls keep the first pool.
pub fn init_thread_pool() {
    if let Some(threads) = thread_cap_from_env() {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}
