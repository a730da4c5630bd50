//! Experiment harness: scenario configs, the six experiments and their reports.

pub mod config;
pub mod experiments;
pub mod hankel;
pub mod report;

pub use config::{Config, Scenario};
pub use experiments::{profile_grid, run, Experiment};
pub use report::{Check, ExperimentReport, Status, Table};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "HANKEL_LAB_THREADS";

/// Size the global rayon pool from `HANKEL_LAB_THREADS`; returns the count used.
/// Later calls (or an already initialized pool) leave the pool unchanged.
pub fn configure_threads() -> usize {
    let n = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    rayon::current_num_threads()
}
