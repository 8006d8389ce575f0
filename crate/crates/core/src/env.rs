//! Stochastic reward environment: sub-Gaussian per-option reward models and
//! their ground-truth statistics (means, variance proxies, gaps).

use rand::RngCore;

use crate::error::Error;
use crate::real::Real;

/// Distribution family of one option's rewards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardKind {
    /// Normal with the variance proxy as standard deviation.
    Gaussian,
    /// {0, 1} with success probability `mean`.
    Bernoulli,
    /// Uniform on `[mean - variance_proxy, mean + variance_proxy]`.
    BoundedUniform,
}

/// One option's reward distribution together with its sub-Gaussian proxy.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardModel<R> {
    kind: RewardKind,
    mean: R,
    variance_proxy: R,
}

impl<R: Real> RewardModel<R> {
    pub fn new(kind: RewardKind, mean: R, variance_proxy: R) -> Result<Self, Error> {
        if !mean.is_finite() || !variance_proxy.is_finite() {
            return Err(Error::InvalidModel("mean and sigma must be finite".into()));
        }
        if variance_proxy <= R::zero() {
            return Err(Error::InvalidModel(format!(
                "variance proxy must be positive, got {variance_proxy}"
            )));
        }
        match kind {
            RewardKind::Gaussian => {}
            RewardKind::Bernoulli => {
                if mean < R::zero() || mean > R::one() {
                    return Err(Error::InvalidModel(format!(
                        "Bernoulli mean must lie in [0,1], got {mean}"
                    )));
                }
                // sub-Gaussian proxy of a [0,1]-valued variable
                if variance_proxy < R::of(0.5) {
                    return Err(Error::InvalidModel(format!(
                        "Bernoulli variance proxy must be >= 1/2, got {variance_proxy}"
                    )));
                }
            }
            // Half-width equals the proxy, so sigma >= (b - a)/2 holds by
            // construction.
            RewardKind::BoundedUniform => {}
        }
        Ok(Self {
            kind,
            mean,
            variance_proxy,
        })
    }

    pub fn gaussian(mean: R, sigma: R) -> Result<Self, Error> {
        Self::new(RewardKind::Gaussian, mean, sigma)
    }

    pub fn bernoulli(mean: R, sigma: R) -> Result<Self, Error> {
        Self::new(RewardKind::Bernoulli, mean, sigma)
    }

    pub fn bounded_uniform(mean: R, half_width: R) -> Result<Self, Error> {
        Self::new(RewardKind::BoundedUniform, mean, half_width)
    }

    pub fn kind(&self) -> RewardKind {
        self.kind
    }

    pub fn mean(&self) -> R {
        self.mean
    }

    pub fn variance_proxy(&self) -> R {
        self.variance_proxy
    }

    /// One draw. Consumes a fixed number of `u64`s per kind: Gaussian 2
    /// (Box-Muller pair, no caching), Bernoulli 1, BoundedUniform 1.
    fn sample<G: RngCore + ?Sized>(&self, rng: &mut G) -> R {
        match self.kind {
            RewardKind::Gaussian => {
                let u1 = R::unit_open(rng);
                let u2 = R::unit_half_open(rng);
                let radius = (-R::of(2.0) * u1.ln()).sqrt();
                let angle = R::of(2.0) * R::PI() * u2;
                self.mean + self.variance_proxy * radius * angle.cos()
            }
            RewardKind::Bernoulli => {
                if R::unit_half_open(rng) < self.mean {
                    R::one()
                } else {
                    R::zero()
                }
            }
            RewardKind::BoundedUniform => {
                let u = R::unit_half_open(rng);
                self.mean + self.variance_proxy * (R::of(2.0) * u - R::one())
            }
        }
    }
}

/// An ordered set of options shared by every agent. Immutable after
/// construction; safe to share across Monte Carlo runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment<R> {
    arms: Vec<RewardModel<R>>,
    optimal: usize,
}

impl<R: Real> Environment<R> {
    pub fn new(arms: Vec<RewardModel<R>>) -> Result<Self, Error> {
        if arms.is_empty() {
            return Err(Error::InvalidModel(
                "environment needs at least one arm".into(),
            ));
        }
        // Lowest-index maximizer so ties are deterministic.
        let mut optimal = 0;
        for i in 1..arms.len() {
            if arms[i].mean() > arms[optimal].mean() {
                optimal = i;
            }
        }
        Ok(Self { arms, optimal })
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[RewardModel<R>] {
        &self.arms
    }

    /// Index of the optimal option (lowest index on mean ties).
    pub fn optimal_arm(&self) -> usize {
        self.optimal
    }

    pub fn optimal_mean(&self) -> R {
        self.arms[self.optimal].mean()
    }

    /// Per-arm variance proxies, in arm order.
    pub fn variance_proxies(&self) -> Vec<R> {
        self.arms.iter().map(|a| a.variance_proxy()).collect()
    }

    /// Suboptimality gaps: optimal mean minus each arm's mean.
    pub fn gaps(&self) -> Vec<R> {
        let best = self.optimal_mean();
        self.arms.iter().map(|a| best - a.mean()).collect()
    }

    /// One reward draw from the given option.
    pub fn sample_reward<G: RngCore + ?Sized>(&self, arm: usize, rng: &mut G) -> Result<R, Error> {
        let model = self.arms.get(arm).ok_or(Error::ArmIndex {
            index: arm,
            arms: self.arms.len(),
        })?;
        Ok(model.sample(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::{stream_rng, StreamPurpose};
    use approx::assert_relative_eq;

    fn section_iv_means() -> Vec<f64> {
        vec![40.0, 50.0, 50.0, 60.0, 70.0, 70.0, 80.0, 90.0, 92.0, 95.0]
    }

    fn gaussian_env(means: &[f64], sigma: f64) -> Environment<f64> {
        Environment::new(
            means
                .iter()
                .map(|&m| RewardModel::gaussian(m, sigma).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_sigma_rejected() {
        assert!(RewardModel::gaussian(40.0, 0.0).is_err());
        assert!(RewardModel::gaussian(40.0, -1.0).is_err());
    }

    #[test]
    fn bernoulli_invariants() {
        assert!(RewardModel::bernoulli(0.3, 0.5).is_ok());
        assert!(RewardModel::bernoulli(1.2, 0.5).is_err());
        assert!(RewardModel::bernoulli(0.3, 0.4).is_err());
    }

    #[test]
    fn replay_is_bit_identical() {
        let env = gaussian_env(&[95.0], 5.0);
        let draw = |seed| {
            let mut rng = stream_rng(seed, 0, 0, StreamPurpose::Reward);
            (0..100)
                .map(|_| env.sample_reward(0, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn invalid_arm_is_domain_error() {
        let env = gaussian_env(&[95.0], 5.0);
        let mut rng = stream_rng(1, 0, 0, StreamPurpose::Reward);
        assert_eq!(
            env.sample_reward(3, &mut rng),
            Err(Error::ArmIndex { index: 3, arms: 1 })
        );
    }

    #[test]
    fn gaussian_sample_mean_and_variance_converge() {
        let env = gaussian_env(&[95.0], 5.0);
        let mut rng = stream_rng(2024, 0, 0, StreamPurpose::Reward);
        let n = 1_000_000usize;
        let mut sum = 0.0f64;
        let mut sumsq = 0.0f64;
        for _ in 0..n {
            let x = env.sample_reward(0, &mut rng).unwrap();
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!((mean - 95.0).abs() < 0.05, "sample mean {mean}");
        assert!((var - 25.0).abs() < 0.25, "sample variance {var}");
    }

    #[test]
    fn bounded_uniform_stays_in_range() {
        let model = RewardModel::bounded_uniform(10.0, 2.0).unwrap();
        let env = Environment::new(vec![model]).unwrap();
        let mut rng = stream_rng(5, 0, 0, StreamPurpose::Reward);
        for _ in 0..10_000 {
            let x = env.sample_reward(0, &mut rng).unwrap();
            assert!((8.0..12.0).contains(&x));
        }
    }

    #[test]
    fn gaps_match_the_star_experiment_table() {
        let env = gaussian_env(&section_iv_means(), 5.0);
        assert_eq!(env.optimal_arm(), 9);
        assert_eq!(
            env.gaps(),
            vec![55.0, 45.0, 45.0, 35.0, 25.0, 25.0, 15.0, 5.0, 3.0, 0.0]
        );
    }

    #[test]
    fn single_arm_gap_is_zero() {
        let env = gaussian_env(&[7.0], 1.0);
        assert_eq!(env.gaps(), vec![0.0]);
        assert_eq!(env.optimal_arm(), 0);
    }

    #[test]
    fn mean_ties_break_to_lowest_index() {
        let env = gaussian_env(&[5.0, 5.0], 1.0);
        assert_eq!(env.optimal_arm(), 0);
        assert_eq!(env.gaps(), vec![0.0, 0.0]);
    }

    #[test]
    fn lln_holds_for_f32_instantiation() {
        let env =
            Environment::<f32>::new(vec![RewardModel::gaussian(2.0f32, 1.0).unwrap()]).unwrap();
        let mut rng = stream_rng(9, 0, 0, StreamPurpose::Reward);
        let n = 100_000;
        let mean: f32 = (0..n)
            .map(|_| env.sample_reward(0, &mut rng).unwrap())
            .sum::<f32>()
            / n as f32;
        assert_relative_eq!(mean, 2.0, epsilon = 0.05);
    }
}
