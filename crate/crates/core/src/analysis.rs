//! Closed-form evaluation of the concentration and regret bounds, plus
//! empirical-vs-theoretical comparison.
//!
//! Natural logarithm everywhere, matching the UCB index. The
//! observation-regret and explore-after-optimal bounds come in two forms:
//! their usual statements carry sigma_i where the sampling bounds carry
//! sigma_i^2, and omit the c*d_k factor on the observation log term —
//! likely typos, but unconfirmed. `BoundMode` selects the faithful
//! as-printed form or the conservative corrected form.

use crate::error::Error;
use crate::policy::ObservationStrategy;
use crate::real::Real;
use crate::sim::AggregateMetrics;

/// Which form of the discrepant bounds to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Exactly the printed statements.
    AsPrinted,
    /// sigma^2 in the log terms, and c*d_k multiplying the
    /// observation-regret log term.
    Corrected,
}

/// nu = 1/ln(zeta) and kappa = 1/(sigma^2 (zeta^{1/4} + zeta^{-1/4})^2).
pub fn concentration_constants<R: Real>(zeta: R, sigma: R) -> Result<(R, R), Error> {
    if zeta <= R::one() || !zeta.is_finite() {
        return Err(Error::InvalidParams(format!(
            "zeta must exceed 1, got {zeta}"
        )));
    }
    if sigma <= R::zero() || !sigma.is_finite() {
        return Err(Error::InvalidParams(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let nu = R::one() / zeta.ln();
    let quarter = R::of(0.25);
    let spread = zeta.powf(quarter) + zeta.powf(-quarter);
    let kappa = R::one() / (sigma * sigma * spread * spread);
    Ok((nu, kappa))
}

/// Everything the bound evaluators need about one agent's problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundParams<R> {
    xi: R,
    zeta: R,
    sigma: Vec<R>,
    gaps: Vec<R>,
    degree: usize,
    cost: R,
    horizon: usize,
}

impl<R: Real> BoundParams<R> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        xi: R,
        zeta: R,
        sigma: Vec<R>,
        gaps: Vec<R>,
        degree: usize,
        cost: R,
        horizon: usize,
    ) -> Result<Self, Error> {
        if xi <= R::one() || !xi.is_finite() {
            return Err(Error::InvalidParams(format!("xi must exceed 1, got {xi}")));
        }
        if zeta <= R::one() || !zeta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "zeta must exceed 1, got {zeta}"
            )));
        }
        if sigma.is_empty() || sigma.len() != gaps.len() {
            return Err(Error::InvalidParams(
                "sigma and gap lists must be nonempty and equally long".into(),
            ));
        }
        if sigma.iter().any(|s| *s <= R::zero() || !s.is_finite()) {
            return Err(Error::InvalidParams("sigma values must be positive".into()));
        }
        if gaps.iter().any(|g| *g < R::zero() || !g.is_finite()) {
            return Err(Error::InvalidParams("gaps must be nonnegative".into()));
        }
        if cost < R::zero() || !cost.is_finite() {
            return Err(Error::InvalidParams(format!(
                "cost must be nonnegative, got {cost}"
            )));
        }
        if horizon == 0 {
            return Err(Error::InvalidParams("horizon must be at least 1".into()));
        }
        Ok(Self {
            xi,
            zeta,
            sigma,
            gaps,
            degree,
            cost,
            horizon,
        })
    }

    pub fn arm_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn xi(&self) -> R {
        self.xi
    }

    pub fn zeta(&self) -> R {
        self.zeta
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cost(&self) -> R {
        self.cost
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn gaps(&self) -> &[R] {
        &self.gaps
    }

    pub fn sigma(&self) -> &[R] {
        &self.sigma
    }

    /// Same problem seen through a different degree (e.g. d = 0 for an
    /// agent that never observes).
    pub fn with_degree(&self, degree: usize) -> Self {
        Self {
            degree,
            ..self.clone()
        }
    }

    /// The three zeta-tail terms shared by every regret display:
    ///   a = (1 + ln(d+1)) / ln(zeta)
    ///   b = (ln(d+1)/xi + 2/(xi-1)) / (2^xi ln(zeta))
    ///   c = (ln(d+1)/(t xi) + 1/(xi-1)) / (t^{xi-1} ln(zeta))
    pub(crate) fn zeta_terms(&self, t: usize) -> (R, R, R) {
        let lz = self.zeta.ln();
        let ln_d = R::of_usize(self.degree + 1).ln();
        let xi = self.xi;
        let tr = R::of_usize(t);
        let one = R::one();
        let two = R::of(2.0);
        let term_a = (one + ln_d) / lz;
        let term_b = (ln_d / xi + two / (xi - one)) / (two.powf(xi) * lz);
        let term_c = (ln_d / (tr * xi) + one / (xi - one)) / (tr.powf(xi - one) * lz);
        (term_a, term_b, term_c)
    }

    /// Per-arm log term `8 sigma^power (xi+1) ln(t) / gap^2`, summed over
    /// suboptimal arms.
    fn log_term_sum(&self, t: usize, sigma_power: u32) -> R {
        let factor = R::of(8.0) * (self.xi + R::one()) * R::of_usize(t).ln();
        self.sigma
            .iter()
            .zip(&self.gaps)
            .filter(|(_, g)| **g > R::zero())
            .map(|(s, g)| factor * s.powi(sigma_power as i32) / (*g * *g))
            .sum()
    }

    /// Deviation-probability bound `nu ln((d_k+1) t) / t^{xi+1}`. Raw value;
    /// clamp to [0,1] for display.
    pub fn tail_bound(&self, t: usize) -> R {
        assert!(t >= 1, "tail_bound needs t >= 1");
        let nu = R::one() / self.zeta.ln();
        let tr = R::of_usize(t);
        nu * (R::of_usize(self.degree + 1) * tr).ln() / tr.powf(self.xi + R::one())
    }

    /// Observation count above which a suboptimal arm's confidence interval
    /// can no longer mask it: `8 sigma^2 (xi+1) ln(t) / gap^2`.
    pub fn exploration_threshold(&self, arm: usize, t: usize) -> Result<R, Error> {
        let (sigma, gap) = self.suboptimal_arm(arm)?;
        let tr = R::of_usize(t);
        Ok(R::of(8.0) * sigma * sigma * (self.xi + R::one()) * tr.ln() / (gap * gap))
    }

    /// Expected pulls of one suboptimal arm until time `t` (four-term sum).
    pub fn suboptimal_pull_bound(&self, arm: usize, t: usize) -> Result<R, Error> {
        let (sigma, gap) = self.suboptimal_arm(arm)?;
        let (term_a, term_b, term_c) = self.zeta_terms(t);
        let log_term =
            R::of(8.0) * sigma * sigma * (self.xi + R::one()) * R::of_usize(t).ln() / (gap * gap);
        Ok(term_a + log_term + term_b + term_c)
    }

    /// Expected cumulative sampling regret until `t`: gap-weighted pull
    /// bounds summed over suboptimal arms.
    pub fn sampling_regret_bound(&self, t: usize) -> R {
        (0..self.arm_count())
            .filter(|&i| self.gaps[i] > R::zero())
            .map(|i| {
                self.gaps[i]
                    * self
                        .suboptimal_pull_bound(i, t)
                        .expect("arm filtered to be suboptimal")
            })
            .sum()
    }

    /// Expected cumulative observation regret until `t` under the
    /// explore-triggered rule.
    pub fn observation_regret_bound(&self, t: usize, mode: BoundMode) -> R {
        let (term_a, term_b, term_c) = self.zeta_terms(t);
        let n = self.arm_count();
        let cd = self.cost * R::of_usize(self.degree);
        let weight = cd * R::of_usize(2 * n - 1);
        let log_term = match mode {
            BoundMode::AsPrinted => self.log_term_sum(t, 1),
            BoundMode::Corrected => cd * self.log_term_sum(t, 2),
        };
        log_term + weight * (term_a + term_b + term_c)
    }

    /// Expected total (sampling + observation) regret until `t`.
    pub fn total_regret_bound(&self, t: usize) -> R {
        let (term_a, term_b, term_c) = self.zeta_terms(t);
        let n = self.arm_count();
        let gap_total: R = self.gaps.iter().copied().sum();
        let weight = gap_total + self.cost * R::of_usize(self.degree) * R::of_usize(2 * n - 1);
        self.log_term_sum(t, 2) + weight * (term_a + term_b + term_c)
    }

    /// Expected explore rounds entered from a suboptimal pull.
    pub fn explore_after_suboptimal_bound(&self, t: usize) -> R {
        let (term_a, term_b, term_c) = self.zeta_terms(t);
        let n_minus_one = R::of_usize(self.arm_count() - 1);
        n_minus_one * (term_a + term_b + term_c) + self.log_term_sum(t, 2)
    }

    /// Expected explore rounds entered from an optimal pull.
    pub fn explore_after_optimal_bound(&self, t: usize, mode: BoundMode) -> R {
        let (term_a, term_b, term_c) = self.zeta_terms(t);
        let n_minus_one = R::of_usize(self.arm_count() - 1);
        let power = match mode {
            BoundMode::AsPrinted => 1,
            BoundMode::Corrected => 2,
        };
        n_minus_one * (term_a + term_b + term_c) + self.log_term_sum(t, power)
    }

    /// Trivial worst-case caps at time `t`: (max-gap * t, cost * d_k * t,
    /// their sum). Useful next to the raw bounds, which exceed them at
    /// small t.
    pub fn trivial_caps(&self, t: usize) -> (R, R, R) {
        let max_gap = self
            .gaps
            .iter()
            .copied()
            .fold(R::zero(), |acc, g| acc.max(g));
        let tr = R::of_usize(t);
        let sampling = max_gap * tr;
        let observation = self.cost * R::of_usize(self.degree) * tr;
        (sampling, observation, sampling + observation)
    }

    fn suboptimal_arm(&self, arm: usize) -> Result<(R, R), Error> {
        if arm >= self.arm_count() {
            return Err(Error::ArmIndex {
                index: arm,
                arms: self.arm_count(),
            });
        }
        if self.gaps[arm] <= R::zero() {
            return Err(Error::InvalidParams(format!(
                "arm {arm} is optimal (zero gap); bound undefined"
            )));
        }
        Ok((self.sigma[arm], self.gaps[arm]))
    }
}

/// Exact expected observation regret of the linear baselines: c*d_k*T for
/// the deterministic strategy, c*d_k*p*T for the probabilistic one.
pub fn linear_baseline_observation_regret<R: Real>(
    strategy: ObservationStrategy,
    cost: R,
    degree: usize,
    horizon: usize,
) -> Result<R, Error> {
    let base = cost * R::of_usize(degree) * R::of_usize(horizon);
    match strategy {
        ObservationStrategy::Always => Ok(base),
        ObservationStrategy::Probabilistic(p) => {
            strategy.validate()?;
            Ok(base * R::of(p))
        }
        ObservationStrategy::ExploreTriggered | ObservationStrategy::Never => Err(
            Error::UnsupportedStrategy("linear_baseline_observation_regret"),
        ),
    }
}

// ---------------------------------------------------------------------------
// Empirical vs theoretical comparison
// ---------------------------------------------------------------------------

/// One (agent, t) row of the comparison table. Raw bounds decide
/// `*_within`; the capped variants clamp to the trivial worst case for
/// display.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundComparison<R> {
    pub agent: usize,
    pub t: usize,
    pub empirical_sampling: R,
    pub bound_sampling: R,
    pub bound_sampling_capped: R,
    pub sampling_within: bool,
    pub empirical_observation: R,
    pub bound_observation: R,
    pub bound_observation_capped: R,
    pub observation_within: bool,
    pub empirical_total: R,
    pub bound_total: R,
    pub bound_total_capped: R,
    pub total_within: bool,
}

/// Tabulate ensemble means against the bound evaluators at the given
/// timesteps.
///
/// The observation bound is strategy-appropriate: the explore-triggered
/// bound for that rule, the exact linear baselines for Always and
/// Probabilistic, zero for Never. Never-agents are also scored against
/// single-agent (d = 0) sampling bounds since they ingest no neighbor
/// samples.
pub fn compare_empirical_to_bound<R: Real>(
    metrics: &AggregateMetrics<R>,
    params: &[BoundParams<R>],
    strategies: &[ObservationStrategy],
    mode: BoundMode,
    ts: &[usize],
) -> Result<Vec<BoundComparison<R>>, Error> {
    if params.len() != metrics.agent_count || strategies.len() != metrics.agent_count {
        return Err(Error::ShapeMismatch(format!(
            "{} agents in metrics, {} bound params, {} strategies",
            metrics.agent_count,
            params.len(),
            strategies.len()
        )));
    }
    for p in params {
        if p.horizon() != metrics.horizon {
            return Err(Error::ShapeMismatch(format!(
                "bound horizon {} vs metrics horizon {}",
                p.horizon(),
                metrics.horizon
            )));
        }
    }
    if let Some(&bad) = ts.iter().find(|&&t| t == 0 || t > metrics.horizon) {
        return Err(Error::ShapeMismatch(format!(
            "logged time {bad} outside 1..={}",
            metrics.horizon
        )));
    }

    let mut rows = Vec::with_capacity(ts.len() * metrics.agent_count);
    for &t in ts {
        for agent in 0..metrics.agent_count {
            let strategy = strategies[agent];
            let effective = match strategy {
                ObservationStrategy::Never => params[agent].with_degree(0),
                _ => params[agent].clone(),
            };
            let bound_sampling = effective.sampling_regret_bound(t);
            let bound_observation = match strategy {
                ObservationStrategy::ExploreTriggered => {
                    effective.observation_regret_bound(t, mode)
                }
                ObservationStrategy::Never => R::zero(),
                ObservationStrategy::Always | ObservationStrategy::Probabilistic(_) => {
                    linear_baseline_observation_regret(
                        strategy,
                        params[agent].cost(),
                        params[agent].degree(),
                        t,
                    )?
                }
            };
            let bound_total = match strategy {
                ObservationStrategy::ExploreTriggered => effective.total_regret_bound(t),
                _ => bound_sampling + bound_observation,
            };
            // Caps use the true degree (the observation cap is what the
            // agent could actually be charged).
            let (cap_s, cap_o, cap_t) = params[agent].trivial_caps(t);
            let empirical_sampling = metrics.mean_sampling[agent][t - 1];
            let empirical_observation = metrics.mean_observation[agent][t - 1];
            let empirical_total = metrics.mean_total[agent][t - 1];
            rows.push(BoundComparison {
                agent,
                t,
                empirical_sampling,
                bound_sampling,
                bound_sampling_capped: bound_sampling.min(cap_s),
                sampling_within: empirical_sampling <= bound_sampling,
                empirical_observation,
                bound_observation,
                bound_observation_capped: bound_observation.min(cap_o),
                observation_within: empirical_observation <= bound_observation,
                empirical_total,
                bound_total,
                bound_total_capped: bound_total.min(cap_t),
                total_within: empirical_total <= bound_total,
            });
        }
    }
    Ok(rows)
}
