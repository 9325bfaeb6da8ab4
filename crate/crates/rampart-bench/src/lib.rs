//! Shared fixtures for the criterion benchmarks.

use rampart_core::{generate, Covariance, GenConfig, Scenario, SynthDataset};

/// A mid-sized linear-regression benchmark dataset with a fixed seed.
pub fn benchmark_dataset(n_obs: usize, n_features: usize) -> SynthDataset {
    generate(&GenConfig {
        n_obs,
        n_features,
        covariance: Covariance::Identity,
        gamma: 0.5,
        scenario: Scenario::LinearRegression,
        seed: 7,
    })
    .expect("valid benchmark config")
}
