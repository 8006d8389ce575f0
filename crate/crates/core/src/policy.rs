//! Per-agent decision logic.
//!
//! The sampling rule picks the arm maximizing
//! `Q_i(t) = mu_hat_i(t) + sigma_i * sqrt(2(xi+1) ln(t) / N_i(t))`
//! where `N_i` counts every observation of arm i (own pulls plus neighbor
//! pulls seen). The observation rule decides, once per round and uniformly
//! over all neighbors, whether to pay for observing them; the
//! explore-triggered rule observes exactly when the round's choice was not
//! an empirical-mean argmax.

use rand::RngCore;

use crate::error::Error;
use crate::real::Real;
use crate::streams::uniform_index;

// ---------------------------------------------------------------------------
// Observation strategies
// ---------------------------------------------------------------------------

/// When an agent pays to observe its neighbors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationStrategy {
    /// Observe on explore rounds only (the costly-observation protocol).
    ExploreTriggered,
    /// Observe every round (deterministic baseline, linear regret).
    Always,
    /// Observe each round with probability `p` (one rng draw per round).
    Probabilistic(f64),
    /// Never observe (single-agent baseline).
    Never,
}

impl ObservationStrategy {
    pub fn validate(&self) -> Result<(), Error> {
        if let Self::Probabilistic(p) = *self {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::InvalidParams(format!(
                    "observation probability must lie in [0,1], got {p}"
                )));
            }
        }
        Ok(())
    }

    /// Stable label used in CSV output and tables.
    pub fn label(&self) -> String {
        match self {
            Self::ExploreTriggered => "explore-triggered".into(),
            Self::Always => "always".into(),
            Self::Probabilistic(p) => format!("probabilistic({p})"),
            Self::Never => "never".into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Policy parameters
// ---------------------------------------------------------------------------

/// Tuning parameter, known variance proxies, and observation strategy for
/// one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams<R> {
    xi: R,
    sigma: Vec<R>,
    strategy: ObservationStrategy,
}

impl<R: Real> PolicyParams<R> {
    pub fn new(xi: R, sigma: Vec<R>, strategy: ObservationStrategy) -> Result<Self, Error> {
        if xi <= R::one() || !xi.is_finite() {
            return Err(Error::InvalidParams(format!("xi must exceed 1, got {xi}")));
        }
        if sigma.is_empty() || sigma.iter().any(|s| *s <= R::zero() || !s.is_finite()) {
            return Err(Error::InvalidParams(
                "per-arm sigma values must be positive and finite".into(),
            ));
        }
        strategy.validate()?;
        Ok(Self {
            xi,
            sigma,
            strategy,
        })
    }

    pub fn xi(&self) -> R {
        self.xi
    }

    pub fn sigma(&self, arm: usize) -> R {
        self.sigma[arm]
    }

    pub fn arm_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn strategy(&self) -> ObservationStrategy {
        self.strategy
    }
}

/// Exploration bonus `sigma * sqrt(2 (xi+1) ln(t) / observations)`.
pub fn confidence_radius<R: Real>(sigma: R, xi: R, t: R, observations: u64) -> R {
    let count = R::of(observations as f64);
    sigma * (R::of(2.0) * (xi + R::one()) * t.ln() / count).sqrt()
}

// ---------------------------------------------------------------------------
// Agent state
// ---------------------------------------------------------------------------

/// One agent's counters and estimates.
///
/// `observed_count[i]` (N_i) counts own pulls plus observed neighbor pulls
/// of arm i; `own_pull_count[i]` (n_i) counts own pulls only, so
/// `own_pull_count[i] <= observed_count[i]` always. `reward_sum[i]` (S_i)
/// mixes own and observed rewards indistinguishably.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState<R> {
    observed_count: Vec<u64>,
    reward_sum: Vec<R>,
    own_pull_count: Vec<u64>,
    clock: usize,
    last_choice: Option<usize>,
    last_was_exploit: bool,
}

impl<R: Real> AgentState<R> {
    pub fn new(arm_count: usize) -> Self {
        Self {
            observed_count: vec![0; arm_count],
            reward_sum: vec![R::zero(); arm_count],
            own_pull_count: vec![0; arm_count],
            clock: 0,
            last_choice: None,
            last_was_exploit: false,
        }
    }

    pub fn arm_count(&self) -> usize {
        self.observed_count.len()
    }

    /// Completed rounds.
    pub fn clock(&self) -> usize {
        self.clock
    }

    pub fn observed_count(&self, arm: usize) -> u64 {
        self.observed_count[arm]
    }

    pub fn own_pull_count(&self, arm: usize) -> u64 {
        self.own_pull_count[arm]
    }

    pub fn own_pull_counts(&self) -> &[u64] {
        &self.own_pull_count
    }

    pub fn reward_sum(&self, arm: usize) -> R {
        self.reward_sum[arm]
    }

    pub fn last_choice(&self) -> Option<usize> {
        self.last_choice
    }

    pub fn last_was_exploit(&self) -> bool {
        self.last_was_exploit
    }

    /// Empirical mean S_i / N_i, or None before the first observation.
    pub fn mean_estimate(&self, arm: usize) -> Option<R> {
        if self.observed_count[arm] == 0 {
            None
        } else {
            Some(self.reward_sum[arm] / R::of(self.observed_count[arm] as f64))
        }
    }

    /// UCB index of one arm. Requires at least one observation of the arm
    /// and a started clock; initialization guarantees both.
    pub fn ucb_index(&self, params: &PolicyParams<R>, arm: usize) -> R {
        let observations = self.observed_count[arm];
        assert!(observations >= 1, "ucb_index needs N_i >= 1 (arm {arm})");
        assert!(self.clock >= 1, "ucb_index needs t >= 1");
        let mean = self.reward_sum[arm] / R::of(observations as f64);
        mean + confidence_radius(
            params.sigma(arm),
            params.xi(),
            R::of_usize(self.clock),
            observations,
        )
    }

    /// Whether `arm` attains the maximum empirical mean. Arms still
    /// unobserved (N_i = 0, possible only during initialization) never
    /// count as exploit and are excluded from the argmax set.
    fn is_empirical_argmax(&self, arm: usize) -> bool {
        if self.observed_count[arm] == 0 {
            return false;
        }
        let mut best: Option<R> = None;
        for i in 0..self.arm_count() {
            if let Some(m) = self.mean_estimate(i) {
                best = Some(match best {
                    Some(b) if b >= m => b,
                    _ => m,
                });
            }
        }
        self.mean_estimate(arm) == best
    }

    fn record_choice(&mut self, arm: usize) {
        self.last_was_exploit = self.is_empirical_argmax(arm);
        self.last_choice = Some(arm);
    }

    /// Pick an argmax of the UCB indices; ties break uniformly at random
    /// (one draw from `rng`, consumed only when a tie exists).
    pub fn choose_option<G: RngCore + ?Sized>(
        &mut self,
        params: &PolicyParams<R>,
        rng: &mut G,
    ) -> usize {
        assert_eq!(params.arm_count(), self.arm_count());
        assert!(
            self.observed_count.iter().all(|&c| c >= 1),
            "choose_option requires every arm observed at least once"
        );
        let mut best = self.ucb_index(params, 0);
        for arm in 1..self.arm_count() {
            let q = self.ucb_index(params, arm);
            if q > best {
                best = q;
            }
        }
        let ties: Vec<usize> = (0..self.arm_count())
            .filter(|&arm| self.ucb_index(params, arm) == best)
            .collect();
        let chosen = if ties.len() == 1 {
            ties[0]
        } else {
            ties[uniform_index(rng, ties.len())]
        };
        self.record_choice(chosen);
        chosen
    }

    /// Record an externally imposed pull (initialization round-robin),
    /// classifying exploit/explore by the same empirical-argmax rule.
    pub fn force_choice(&mut self, arm: usize) {
        assert!(arm < self.arm_count());
        self.record_choice(arm);
    }

    /// Whether to observe all neighbors this round. Must run after the
    /// round's choice; the decision applies uniformly to every neighbor.
    pub fn decide_observation<G: RngCore + ?Sized>(
        &self,
        params: &PolicyParams<R>,
        rng: &mut G,
    ) -> bool {
        match params.strategy() {
            ObservationStrategy::ExploreTriggered => {
                assert!(
                    self.last_choice.is_some(),
                    "decide_observation requires a choice this round"
                );
                !self.last_was_exploit
            }
            ObservationStrategy::Always => true,
            ObservationStrategy::Never => false,
            ObservationStrategy::Probabilistic(p) => f64::unit_half_open(rng) < p,
        }
    }

    /// Ingest the agent's own pull: advances n_i, N_i, S_i and the clock.
    pub fn update_own(&mut self, arm: usize, reward: R) {
        assert_eq!(
            self.last_choice,
            Some(arm),
            "update_own must match the round's choice"
        );
        self.own_pull_count[arm] += 1;
        self.observed_count[arm] += 1;
        self.reward_sum[arm] = self.reward_sum[arm] + reward;
        self.clock += 1;
    }

    /// Ingest one observed neighbor pull: advances N_i and S_i only.
    pub fn update_observed(&mut self, neighbor_choice: usize, neighbor_reward: R) {
        assert!(neighbor_choice < self.arm_count());
        self.observed_count[neighbor_choice] += 1;
        self.reward_sum[neighbor_choice] = self.reward_sum[neighbor_choice] + neighbor_reward;
    }
}

#[cfg(test)]
// Golden literals are frozen at 17 significant digits from the oracle
// calculation; keep them verbatim.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::streams::{stream_rng, StreamPurpose};
    use approx::assert_relative_eq;

    fn params(xi: f64, sigma: Vec<f64>) -> PolicyParams<f64> {
        PolicyParams::new(xi, sigma, ObservationStrategy::ExploreTriggered).unwrap()
    }

    /// State with prescribed counters; own pulls set to observed counts.
    fn state_with(counts: &[u64], sums: &[f64], clock: usize) -> AgentState<f64> {
        let mut s = AgentState::new(counts.len());
        s.observed_count = counts.to_vec();
        s.reward_sum = sums.to_vec();
        s.own_pull_count = counts.to_vec();
        s.clock = clock;
        s
    }

    #[test]
    fn xi_must_exceed_one() {
        assert!(PolicyParams::new(1.0, vec![1.0], ObservationStrategy::Never).is_err());
        assert!(PolicyParams::new(1.01, vec![1.0], ObservationStrategy::Never).is_ok());
        assert!(
            PolicyParams::new(2.0, vec![1.0], ObservationStrategy::Probabilistic(1.5)).is_err()
        );
    }

    #[test]
    fn confidence_radius_hand_values() {
        // sigma=1, xi=1, ln t = 1, N=2 -> sqrt(2 * 2 * 1 / 2) = sqrt(2)
        let r = confidence_radius(1.0, 1.0, std::f64::consts::E, 2);
        assert_relative_eq!(r, std::f64::consts::SQRT_2, max_relative = 1e-9);
    }

    #[test]
    fn ucb_index_at_t1_is_the_plain_mean() {
        let p = params(1.5, vec![2.0, 2.0]);
        let s = state_with(&[1, 1], &[3.0, -1.0], 1);
        assert_eq!(s.ucb_index(&p, 0), 3.0);
        assert_eq!(s.ucb_index(&p, 1), -1.0);
    }

    #[test]
    fn ucb_index_matches_hand_evaluated_formula() {
        // mu=90 from 50 observations, sigma=5, xi=1.01, t=1000:
        // 90 + 5*sqrt(2 * 2.01 * ln(1000) / 50)
        let p = params(1.01, vec![5.0]);
        let s = state_with(&[50], &[50.0 * 90.0], 1000);
        assert_relative_eq!(s.ucb_index(&p, 0), 93.726202907888149, max_relative = 1e-9);
    }

    #[test]
    #[should_panic(expected = "N_i >= 1")]
    fn ucb_index_rejects_unobserved_arm() {
        let p = params(1.5, vec![1.0]);
        let s = state_with(&[0], &[0.0], 1);
        s.ucb_index(&p, 0);
    }

    #[test]
    fn identical_arms_tie_break_uniformly() {
        let p = params(1.01, vec![1.0, 1.0]);
        let mut rng = stream_rng(17, 0, 0, StreamPurpose::TieBreak);
        let trials = 10_000;
        let mut first = 0;
        for _ in 0..trials {
            let mut s = state_with(&[3, 3], &[1.5, 1.5], 6);
            if s.choose_option(&p, &mut rng) == 0 {
                first += 1;
            }
        }
        let freq = first as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.03, "tie-break frequency {freq}");
    }

    #[test]
    fn strict_maximum_always_wins() {
        let p = params(1.01, vec![1.0, 1.0]);
        let mut rng = stream_rng(18, 0, 0, StreamPurpose::TieBreak);
        for _ in 0..100 {
            let mut s = state_with(&[3, 3], &[9.0, 1.5], 6);
            assert_eq!(s.choose_option(&p, &mut rng), 0);
            assert!(s.last_was_exploit());
        }
    }

    #[test]
    fn ucb_choice_with_lower_mean_counts_as_explore() {
        // Arm 1 has the higher empirical mean, but arm 0 is barely sampled
        // so its bonus dominates: choice = 0, classified explore.
        let p = params(1.01, vec![5.0, 5.0]);
        let mut s = state_with(&[1, 200], &[1.0, 200.0 * 2.0], 201);
        let q0 = s.ucb_index(&p, 0);
        let q1 = s.ucb_index(&p, 1);
        assert!(q0 > q1, "constructed state must favor arm 0 ({q0} vs {q1})");
        assert!(s.mean_estimate(1).unwrap() > s.mean_estimate(0).unwrap());
        let mut rng = stream_rng(19, 0, 0, StreamPurpose::TieBreak);
        assert_eq!(s.choose_option(&p, &mut rng), 0);
        assert!(!s.last_was_exploit());
        assert!(s.decide_observation(&p, &mut rng));
    }

    #[test]
    fn exploit_tie_counts_as_exploit() {
        // Chosen arm's mean ties the max mean: exploit, no observation.
        let p = params(1.01, vec![1.0, 1.0]);
        let mut s = state_with(&[4, 4], &[8.0, 8.0], 8);
        let mut rng = stream_rng(20, 0, 0, StreamPurpose::TieBreak);
        s.choose_option(&p, &mut rng);
        assert!(s.last_was_exploit());
        assert!(!s.decide_observation(&p, &mut rng));
    }

    #[test]
    fn never_and_always_ignore_state() {
        let never = PolicyParams::new(1.5, vec![1.0], ObservationStrategy::Never).unwrap();
        let always = PolicyParams::new(1.5, vec![1.0], ObservationStrategy::Always).unwrap();
        let mut s = AgentState::new(1);
        s.force_choice(0);
        let mut rng = stream_rng(21, 0, 0, StreamPurpose::Observation);
        assert!(!s.decide_observation(&never, &mut rng));
        assert!(s.decide_observation(&always, &mut rng));
    }

    #[test]
    fn probabilistic_frequency_matches_p() {
        let p = PolicyParams::new(1.5, vec![1.0], ObservationStrategy::Probabilistic(0.3)).unwrap();
        let mut s = AgentState::new(1);
        s.force_choice(0);
        let mut rng = stream_rng(22, 0, 0, StreamPurpose::Observation);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| s.decide_observation(&p, &mut rng))
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.3).abs() < 0.005, "observed frequency {freq}");
    }

    #[test]
    fn update_own_accumulates_mean() {
        let mut s = AgentState::<f64>::new(2);
        s.force_choice(1);
        s.update_own(1, 5.0);
        assert_eq!(s.own_pull_count(1), 1);
        assert_eq!(s.observed_count(1), 1);
        assert_eq!(s.mean_estimate(1), Some(5.0));
        s.force_choice(1);
        s.update_own(1, 4.0);
        s.force_choice(1);
        s.update_own(1, 6.0);
        assert_eq!(s.mean_estimate(1), Some(5.0));
        assert_eq!(s.clock(), 3);
    }

    #[test]
    #[should_panic(expected = "must match the round's choice")]
    fn update_own_requires_matching_choice() {
        let mut s = AgentState::<f64>::new(2);
        s.force_choice(0);
        s.update_own(1, 5.0);
    }

    #[test]
    fn update_observed_leaves_own_pulls_alone() {
        let mut s = AgentState::<f64>::new(4);
        s.update_observed(2, 7.0);
        assert_eq!(s.observed_count(2), 1);
        assert_eq!(s.own_pull_count(2), 0);
        assert_eq!(s.reward_sum(2), 7.0);
        assert_eq!(s.clock(), 0);
    }

    #[test]
    fn unobserved_arm_is_never_exploit() {
        let mut s = AgentState::<f64>::new(2);
        s.update_observed(0, 1.0);
        s.force_choice(1); // arm 1 has N = 0
        assert!(!s.last_was_exploit());
        s.force_choice(0);
        assert!(s.last_was_exploit());
    }
}
