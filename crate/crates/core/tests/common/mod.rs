//! Shared scenario builders for the integration tests.
#![allow(dead_code)]

use bandit_net::{Environment, ObservationGraph, ObservationStrategy, RewardModel, Scenario};

pub const STAR_MEANS: [f64; 10] = [40.0, 50.0, 50.0, 60.0, 70.0, 70.0, 80.0, 90.0, 92.0, 95.0];

pub fn gaussian_environment(means: &[f64], sigma: f64) -> Environment<f64> {
    Environment::new(
        means
            .iter()
            .map(|&m| RewardModel::gaussian(m, sigma).unwrap())
            .collect(),
    )
    .unwrap()
}

/// The six-agent star experiment: ten sigma=5 Gaussian arms, unit cost,
/// xi = 1.01, horizon 1000.
pub fn star_scenario(strategy: ObservationStrategy, runs: usize, seed: u64) -> Scenario<f64> {
    Scenario::homogeneous(
        gaussian_environment(&STAR_MEANS, 5.0),
        ObservationGraph::star(6).unwrap(),
        1.01,
        strategy,
        1.0,
        1000,
        runs,
        seed,
    )
    .unwrap()
}
