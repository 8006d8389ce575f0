//! Synchronous-round episode execution and Monte Carlo aggregation.
//!
//! Round order within a step: every agent picks an arm from its round-start
//! state (forced round-robin while t <= N, the UCB rule afterwards), the
//! observation decision is classified against that same state, all rewards
//! realize simultaneously, and only then do agents ingest their own sample
//! plus (if observing) every neighbor's (choice, reward) from this round,
//! paying `cost` per neighbor observed.

use rayon::prelude::*;

use crate::env::Environment;
use crate::error::Error;
use crate::graph::ObservationGraph;
use crate::policy::{AgentState, ObservationStrategy, PolicyParams};
use crate::real::Real;
use crate::streams::{stream_rng, StreamPurpose};

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// A full experiment description. Immutable; shared across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<R> {
    environment: Environment<R>,
    graph: ObservationGraph,
    xi: R,
    strategies: Vec<ObservationStrategy>,
    cost: R,
    horizon: usize,
    runs: usize,
    master_seed: u64,
}

impl<R: Real> Scenario<R> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        environment: Environment<R>,
        graph: ObservationGraph,
        xi: R,
        strategies: Vec<ObservationStrategy>,
        cost: R,
        horizon: usize,
        runs: usize,
        master_seed: u64,
    ) -> Result<Self, Error> {
        if strategies.len() != graph.agent_count() {
            return Err(Error::InvalidScenario(format!(
                "{} strategies for {} agents",
                strategies.len(),
                graph.agent_count()
            )));
        }
        for s in &strategies {
            s.validate()?;
        }
        if horizon < environment.arm_count() {
            return Err(Error::InvalidScenario(format!(
                "horizon {} shorter than the {}-arm initialization",
                horizon,
                environment.arm_count()
            )));
        }
        if runs == 0 {
            return Err(Error::InvalidScenario("at least one run required".into()));
        }
        if cost < R::zero() || !cost.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "observation cost must be nonnegative, got {cost}"
            )));
        }
        // Validates xi and sigma as a side effect.
        PolicyParams::new(xi, environment.variance_proxies(), strategies[0])?;
        Ok(Self {
            environment,
            graph,
            xi,
            strategies,
            cost,
            horizon,
            runs,
            master_seed,
        })
    }

    /// Scenario where every agent uses the same observation strategy.
    #[allow(clippy::too_many_arguments)]
    pub fn homogeneous(
        environment: Environment<R>,
        graph: ObservationGraph,
        xi: R,
        strategy: ObservationStrategy,
        cost: R,
        horizon: usize,
        runs: usize,
        master_seed: u64,
    ) -> Result<Self, Error> {
        let strategies = vec![strategy; graph.agent_count()];
        Self::new(
            environment,
            graph,
            xi,
            strategies,
            cost,
            horizon,
            runs,
            master_seed,
        )
    }

    /// Same experiment with a different homogeneous strategy (same seed, so
    /// strategies stay comparable run for run).
    pub fn with_strategy(&self, strategy: ObservationStrategy) -> Result<Self, Error> {
        Self::homogeneous(
            self.environment.clone(),
            self.graph.clone(),
            self.xi,
            strategy,
            self.cost,
            self.horizon,
            self.runs,
            self.master_seed,
        )
    }

    pub fn environment(&self) -> &Environment<R> {
        &self.environment
    }

    pub fn graph(&self) -> &ObservationGraph {
        &self.graph
    }

    pub fn xi(&self) -> R {
        self.xi
    }

    pub fn strategies(&self) -> &[ObservationStrategy] {
        &self.strategies
    }

    pub fn cost(&self) -> R {
        self.cost
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn agent_count(&self) -> usize {
        self.graph.agent_count()
    }

    pub fn policy_params(&self, agent: usize) -> PolicyParams<R> {
        PolicyParams::new(
            self.xi,
            self.environment.variance_proxies(),
            self.strategies[agent],
        )
        .expect("validated at scenario construction")
    }
}

// ---------------------------------------------------------------------------
// Per-run metrics and event log
// ---------------------------------------------------------------------------

/// Per-agent cumulative regret series and end-of-run counters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics<R> {
    /// `[agent][t-1]`: cumulative sampling regret after round t.
    pub sampling_regret: Vec<Vec<R>>,
    /// `[agent][t-1]`: cumulative observation regret after round t.
    pub observation_regret: Vec<Vec<R>>,
    /// `[agent][arm]`: own pulls n_i at the horizon.
    pub pull_counts: Vec<Vec<u64>>,
    /// `[agent]`: total neighbor-observations charged.
    pub observation_counts: Vec<u64>,
}

/// What actually happened in one round, for replay oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundEvents<R> {
    pub choices: Vec<usize>,
    pub rewards: Vec<R>,
    /// Raw per-agent observation decision (before multiplying by degree).
    pub observed: Vec<bool>,
}

/// Full per-round record of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog<R> {
    pub rounds: Vec<RoundEvents<R>>,
}

/// Everything one episode produced: metrics, the per-round event log, and
/// each agent's final counters. Replay oracles check metrics against the
/// log without touching the simulator's own accumulation.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace<R> {
    pub metrics: RunMetrics<R>,
    pub log: EventLog<R>,
    pub final_states: Vec<AgentState<R>>,
}

// ---------------------------------------------------------------------------
// Episode execution
// ---------------------------------------------------------------------------

/// Execute one episode. Identical inputs give bit-identical output.
pub fn run_episode<R: Real>(scenario: &Scenario<R>, run_index: u64) -> RunMetrics<R> {
    episode(scenario, run_index, false).0
}

/// Execute one episode, recording the event log and final states.
pub fn run_episode_traced<R: Real>(scenario: &Scenario<R>, run_index: u64) -> EpisodeTrace<R> {
    let (metrics, log, final_states) = episode(scenario, run_index, true);
    EpisodeTrace {
        metrics,
        log: log.expect("event log requested"),
        final_states,
    }
}

fn episode<R: Real>(
    scenario: &Scenario<R>,
    run_index: u64,
    record: bool,
) -> (RunMetrics<R>, Option<EventLog<R>>, Vec<AgentState<R>>) {
    let agents = scenario.agent_count();
    let arms = scenario.environment.arm_count();
    let horizon = scenario.horizon;
    let gaps = scenario.environment.gaps();
    let graph = &scenario.graph;
    let cost = scenario.cost;

    let params: Vec<PolicyParams<R>> = (0..agents).map(|a| scenario.policy_params(a)).collect();
    let mut states: Vec<AgentState<R>> = (0..agents).map(|_| AgentState::new(arms)).collect();
    let seed = scenario.master_seed;
    let mut reward_rngs: Vec<_> = (0..agents)
        .map(|a| stream_rng(seed, run_index, a as u64, StreamPurpose::Reward))
        .collect();
    let mut tie_rngs: Vec<_> = (0..agents)
        .map(|a| stream_rng(seed, run_index, a as u64, StreamPurpose::TieBreak))
        .collect();
    let mut obs_rngs: Vec<_> = (0..agents)
        .map(|a| stream_rng(seed, run_index, a as u64, StreamPurpose::Observation))
        .collect();

    let mut sampling_regret = vec![Vec::with_capacity(horizon); agents];
    let mut observation_regret = vec![Vec::with_capacity(horizon); agents];
    let mut cumulative_sampling = vec![R::zero(); agents];
    let mut cumulative_observation = vec![R::zero(); agents];
    let mut observation_counts = vec![0u64; agents];

    let mut choices = vec![0usize; agents];
    let mut rewards = vec![R::zero(); agents];
    let mut observes = vec![false; agents];
    let mut log = record.then(|| EventLog {
        rounds: Vec::with_capacity(horizon),
    });

    for t in 1..=horizon {
        // All choices come from round-start state.
        for a in 0..agents {
            choices[a] = if t <= arms {
                // Forced round-robin; the agent offset keeps symmetric
                // graphs desynchronized.
                let arm = (t + a) % arms;
                states[a].force_choice(arm);
                arm
            } else {
                states[a].choose_option(&params[a], &mut tie_rngs[a])
            };
        }
        for a in 0..agents {
            observes[a] = states[a].decide_observation(&params[a], &mut obs_rngs[a]);
        }
        // Rewards realize simultaneously.
        for a in 0..agents {
            rewards[a] = scenario
                .environment
                .sample_reward(choices[a], &mut reward_rngs[a])
                .expect("choice is a valid arm");
        }
        // Ingest own sample, then observed neighbors.
        for a in 0..agents {
            states[a].update_own(choices[a], rewards[a]);
        }
        for a in 0..agents {
            if observes[a] {
                let neighbors = graph.neighbors(a).expect("agent index valid");
                for &j in neighbors {
                    states[a].update_observed(choices[j], rewards[j]);
                }
                observation_counts[a] += neighbors.len() as u64;
            }
        }
        // Regret accounting.
        for a in 0..agents {
            cumulative_sampling[a] = cumulative_sampling[a] + gaps[choices[a]];
            if observes[a] {
                let degree = graph.neighbors(a).expect("agent index valid").len();
                cumulative_observation[a] = cumulative_observation[a] + cost * R::of_usize(degree);
            }
            sampling_regret[a].push(cumulative_sampling[a]);
            observation_regret[a].push(cumulative_observation[a]);
        }
        if let Some(log) = log.as_mut() {
            log.rounds.push(RoundEvents {
                choices: choices.clone(),
                rewards: rewards.clone(),
                observed: observes.clone(),
            });
        }
    }

    let pull_counts = states
        .iter()
        .map(|s| s.own_pull_counts().to_vec())
        .collect();
    (
        RunMetrics {
            sampling_regret,
            observation_regret,
            pull_counts,
            observation_counts,
        },
        log,
        states,
    )
}

// ---------------------------------------------------------------------------
// Monte Carlo aggregation
// ---------------------------------------------------------------------------

/// Ensemble mean and standard error of every per-agent series, plus the
/// per-run end-of-horizon values needed for downstream statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMetrics<R> {
    pub agent_count: usize,
    pub horizon: usize,
    pub runs: usize,
    pub mean_sampling: Vec<Vec<R>>,
    pub se_sampling: Vec<Vec<R>>,
    pub mean_observation: Vec<Vec<R>>,
    pub se_observation: Vec<Vec<R>>,
    pub mean_total: Vec<Vec<R>>,
    pub se_total: Vec<Vec<R>>,
    /// `[agent][arm]`: mean own pulls at the horizon.
    pub mean_pull_counts: Vec<Vec<R>>,
    /// `[run][agent]`: end-of-horizon sampling regret per run.
    pub final_sampling: Vec<Vec<R>>,
    /// `[run][agent]`: end-of-horizon observation regret per run.
    pub final_observation: Vec<Vec<R>>,
}

/// Run the full ensemble. Runs execute in parallel (rayon pool of the
/// caller's choosing); the reduction always folds in run order, so the
/// result is independent of thread count.
pub fn run_monte_carlo<R: Real>(scenario: &Scenario<R>) -> AggregateMetrics<R> {
    let runs: Vec<RunMetrics<R>> = (0..scenario.runs as u64)
        .into_par_iter()
        .map(|r| run_episode(scenario, r))
        .collect();
    aggregate(scenario, &runs)
}

fn aggregate<R: Real>(scenario: &Scenario<R>, runs: &[RunMetrics<R>]) -> AggregateMetrics<R> {
    let agents = scenario.agent_count();
    let horizon = scenario.horizon;
    let arms = scenario.environment.arm_count();
    let m = runs.len();

    let mut sum_s = vec![vec![R::zero(); horizon]; agents];
    let mut sq_s = vec![vec![R::zero(); horizon]; agents];
    let mut sum_o = vec![vec![R::zero(); horizon]; agents];
    let mut sq_o = vec![vec![R::zero(); horizon]; agents];
    let mut sum_t = vec![vec![R::zero(); horizon]; agents];
    let mut sq_t = vec![vec![R::zero(); horizon]; agents];
    let mut sum_pulls = vec![vec![R::zero(); arms]; agents];
    let mut final_sampling = Vec::with_capacity(m);
    let mut final_observation = Vec::with_capacity(m);

    for run in runs {
        for a in 0..agents {
            for t in 0..horizon {
                let s = run.sampling_regret[a][t];
                let o = run.observation_regret[a][t];
                let tot = s + o;
                sum_s[a][t] = sum_s[a][t] + s;
                sq_s[a][t] = sq_s[a][t] + s * s;
                sum_o[a][t] = sum_o[a][t] + o;
                sq_o[a][t] = sq_o[a][t] + o * o;
                sum_t[a][t] = sum_t[a][t] + tot;
                sq_t[a][t] = sq_t[a][t] + tot * tot;
            }
            for (sum, &pulls) in sum_pulls[a].iter_mut().zip(&run.pull_counts[a]) {
                *sum = *sum + R::of(pulls as f64);
            }
        }
        final_sampling.push(
            (0..agents)
                .map(|a| run.sampling_regret[a][horizon - 1])
                .collect(),
        );
        final_observation.push(
            (0..agents)
                .map(|a| run.observation_regret[a][horizon - 1])
                .collect(),
        );
    }

    let count = R::of_usize(m);
    let mean_of = |sum: &Vec<Vec<R>>| -> Vec<Vec<R>> {
        sum.iter()
            .map(|row| row.iter().map(|&x| x / count).collect())
            .collect()
    };
    let se_of = |sum: &Vec<Vec<R>>, sq: &Vec<Vec<R>>| -> Vec<Vec<R>> {
        sum.iter()
            .zip(sq)
            .map(|(srow, qrow)| {
                srow.iter()
                    .zip(qrow)
                    .map(|(&s, &q)| standard_error(s, q, m))
                    .collect()
            })
            .collect()
    };

    AggregateMetrics {
        agent_count: agents,
        horizon,
        runs: m,
        mean_sampling: mean_of(&sum_s),
        se_sampling: se_of(&sum_s, &sq_s),
        mean_observation: mean_of(&sum_o),
        se_observation: se_of(&sum_o, &sq_o),
        mean_total: mean_of(&sum_t),
        se_total: se_of(&sum_t, &sq_t),
        mean_pull_counts: mean_of(&sum_pulls),
        final_sampling,
        final_observation,
    }
}

/// Standard error of the mean from raw sum and sum of squares.
fn standard_error<R: Real>(sum: R, sumsq: R, m: usize) -> R {
    if m < 2 {
        return R::zero();
    }
    let count = R::of_usize(m);
    let variance = (sumsq - sum * sum / count) / R::of_usize(m - 1);
    (variance.max(R::zero()) / count).sqrt()
}
