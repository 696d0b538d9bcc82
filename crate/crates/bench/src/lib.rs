//! Shared fixtures for the benchmarks.

use vlc_noma::experiment::{run_realization, Realization};
use vlc_noma::{ExperimentConfig, Scheme};

/// A paired network with `users` users on the default room, ready for
/// allocation. The optimizer is run for a single step only.
pub fn network(users: usize, subcarriers: usize, seed: u64) -> Realization {
    let cfg = ExperimentConfig {
        users,
        sa_outer_iters: 1,
        sa_m0: 1.0,
        ..ExperimentConfig::default()
    };
    let point = cfg
        .point(users as f64, Some(subcarriers), Scheme::Imposed)
        .expect("valid fixture");
    run_realization(&point, seed).expect("fixture realization")
}
