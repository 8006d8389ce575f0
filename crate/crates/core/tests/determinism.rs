//! Determinism contract: (scenario, master_seed) fully determines every
//! output, regardless of thread count.

mod common;

use bandit_net::{run_episode, run_monte_carlo, ObservationStrategy};
use common::star_scenario;

#[test]
fn repeated_episodes_are_bit_identical() {
    let scenario = star_scenario(ObservationStrategy::ExploreTriggered, 1, 4242);
    let a = run_episode(&scenario, 17);
    let b = run_episode(&scenario, 17);
    assert_eq!(a, b);
}

#[test]
fn monte_carlo_is_independent_of_thread_count() {
    let scenario = star_scenario(ObservationStrategy::ExploreTriggered, 24, 7);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_monte_carlo(&scenario));
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| run_monte_carlo(&scenario));
    assert_eq!(single, many);
}

#[test]
fn different_seeds_differ() {
    let a = run_episode(
        &star_scenario(ObservationStrategy::ExploreTriggered, 1, 1),
        0,
    );
    let b = run_episode(
        &star_scenario(ObservationStrategy::ExploreTriggered, 1, 2),
        0,
    );
    assert_ne!(a.sampling_regret, b.sampling_regret);
}
