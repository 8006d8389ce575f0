//! Multi-agent multi-armed bandits with costly neighbor observation.
//!
//! Agents repeatedly sample one of N sub-Gaussian options and may pay a
//! fixed cost per neighbor to observe neighbors' instantaneous choices and
//! rewards over an undirected graph. The crate provides:
//!
//! - the UCB-style sampling rule and the explore-triggered observation rule,
//!   plus always/probabilistic/never baselines ([`policy`]);
//! - a deterministic, seedable synchronous-round simulator with Monte Carlo
//!   aggregation and full regret accounting ([`sim`]);
//! - closed-form evaluators for the concentration and regret bounds and
//!   empirical-vs-bound comparison ([`analysis`]).
//!
//! All core math is generic over the scalar type through [`real::Real`];
//! the `*64` aliases below fix f64, which is what the CLI uses.

pub mod analysis;
pub mod env;
pub mod error;
pub mod graph;
pub mod policy;
pub mod real;
pub mod sim;
pub mod streams;

pub use analysis::{
    compare_empirical_to_bound, concentration_constants, linear_baseline_observation_regret,
    BoundComparison, BoundMode, BoundParams,
};
pub use env::{Environment, RewardKind, RewardModel};
pub use error::Error;
pub use graph::{GraphSpec, ObservationGraph};
pub use policy::{AgentState, ObservationStrategy, PolicyParams};
pub use real::Real;
pub use sim::{
    run_episode, run_episode_traced, run_monte_carlo, AggregateMetrics, EpisodeTrace, EventLog,
    RunMetrics, Scenario,
};

/// f64 instantiations used by the CLI and most callers.
pub type Environment64 = Environment<f64>;
pub type RewardModel64 = RewardModel<f64>;
pub type AgentState64 = AgentState<f64>;
pub type PolicyParams64 = PolicyParams<f64>;
pub type Scenario64 = Scenario<f64>;
pub type RunMetrics64 = RunMetrics<f64>;
pub type AggregateMetrics64 = AggregateMetrics<f64>;
pub type BoundParams64 = BoundParams<f64>;
