//! Scenario configuration files: strict TOML with the keys below; unknown
//! keys are rejected with an error naming the key.
//!
//! ```toml
//! [[arms]]
//! kind = "gaussian"        # gaussian | bernoulli | uniform
//! mean = 40.0
//! sigma = 5.0
//!
//! [graph]
//! kind = "star"            # star | complete | cycle | edges
//! k = 6                    # agent count (edges may infer it)
//! # edges = [[1, 2], [2, 3]]   # 1-based agent pairs for kind = "edges"
//!
//! [policy]
//! xi = 1.01
//! strategy = "explore-triggered"  # always | never | probabilistic
//! # p = 0.2                       # required for probabilistic
//!
//! cost = 1.0
//! horizon = 1000
//! runs = 1000
//! seed = 42                 # optional; BANDIT_NET_SEED is the fallback
//!
//! [bounds]
//! zeta = 2.718281828459045  # optional, default e
//! mode = "as_printed"       # as_printed | corrected
//!
//! [output]
//! csv_path = "out.csv"
//! # svg_path = "out.svg"
//! log_every = 10
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use bandit_net::{
    BoundMode, BoundParams, Environment, Error as CoreError, GraphSpec, ObservationGraph,
    ObservationStrategy, RewardModel, Scenario,
};

pub const SEED_ENV_VAR: &str = "BANDIT_NET_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    // Scalars first so serialization emits them before the tables.
    pub cost: f64,
    pub horizon: usize,
    pub runs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub arms: Vec<ArmConfig>,
    pub graph: GraphConfig,
    pub policy: PolicyConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    pub kind: ArmKind,
    pub mean: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmKind {
    Gaussian,
    Bernoulli,
    /// Uniform on `[mean - sigma, mean + sigma]`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub kind: GraphKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// 1-based agent pairs, for `kind = "edges"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Star,
    Complete,
    Cycle,
    Edges,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub xi: f64,
    pub strategy: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    ExploreTriggered,
    Always,
    Probabilistic,
    Never,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default)]
    pub mode: ModeKind,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            zeta: default_zeta(),
            mode: ModeKind::default(),
        }
    }
}

fn default_zeta() -> f64 {
    std::f64::consts::E
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    #[default]
    AsPrinted,
    Corrected,
}

impl From<ModeKind> for BoundMode {
    fn from(mode: ModeKind) -> Self {
        match mode {
            ModeKind::AsPrinted => BoundMode::AsPrinted,
            ModeKind::Corrected => BoundMode::Corrected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
    #[serde(default = "default_log_every")]
    pub log_every: usize,
}

fn default_log_every() -> usize {
    10
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn strategy(&self) -> Result<ObservationStrategy, String> {
        match self.policy.strategy {
            StrategyKind::ExploreTriggered => Ok(ObservationStrategy::ExploreTriggered),
            StrategyKind::Always => Ok(ObservationStrategy::Always),
            StrategyKind::Never => Ok(ObservationStrategy::Never),
            StrategyKind::Probabilistic => {
                let p = self
                    .policy
                    .p
                    .ok_or("policy.p is required for the probabilistic strategy")?;
                Ok(ObservationStrategy::Probabilistic(p))
            }
        }
    }

    pub fn environment(&self) -> Result<Environment<f64>, CoreError> {
        Environment::new(
            self.arms
                .iter()
                .map(|arm| match arm.kind {
                    ArmKind::Gaussian => RewardModel::gaussian(arm.mean, arm.sigma),
                    ArmKind::Bernoulli => RewardModel::bernoulli(arm.mean, arm.sigma),
                    ArmKind::Uniform => RewardModel::bounded_uniform(arm.mean, arm.sigma),
                })
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    pub fn graph(&self) -> Result<ObservationGraph, String> {
        let spec = match self.graph.kind {
            GraphKind::Star => GraphSpec::Star {
                agents: self
                    .graph
                    .k
                    .ok_or("graph.k is required for kind = \"star\"")?,
            },
            GraphKind::Complete => GraphSpec::Complete {
                agents: self
                    .graph
                    .k
                    .ok_or("graph.k is required for kind = \"complete\"")?,
            },
            GraphKind::Cycle => GraphSpec::Cycle {
                agents: self
                    .graph
                    .k
                    .ok_or("graph.k is required for kind = \"cycle\"")?,
            },
            GraphKind::Edges => {
                let pairs_io = self
                    .graph
                    .edges
                    .as_ref()
                    .ok_or("graph.edges is required for kind = \"edges\"")?;
                let mut pairs = Vec::with_capacity(pairs_io.len());
                let mut max_seen = 1;
                for &[a, b] in pairs_io {
                    if a == 0 || b == 0 {
                        return Err("graph.edges agent ids are 1-based".into());
                    }
                    max_seen = max_seen.max(a).max(b);
                    pairs.push((a - 1, b - 1));
                }
                // An explicit k smaller than an edge endpoint is rejected
                // by the graph validator below.
                GraphSpec::Edges {
                    agents: self.graph.k.unwrap_or(max_seen),
                    pairs,
                }
            }
        };
        ObservationGraph::build(&spec).map_err(|e| e.to_string())
    }

    /// Build the runnable scenario with the resolved seed.
    pub fn scenario(&self, seed: u64) -> Result<Scenario<f64>, String> {
        let environment = self.environment().map_err(|e| e.to_string())?;
        let graph = self.graph()?;
        let strategy = self.strategy()?;
        Scenario::homogeneous(
            environment,
            graph,
            self.policy.xi,
            strategy,
            self.cost,
            self.horizon,
            self.runs,
            seed,
        )
        .map_err(|e| e.to_string())
    }

    /// Per-agent bound parameters matching `scenario`.
    pub fn bound_params(&self, scenario: &Scenario<f64>) -> Result<Vec<BoundParams<f64>>, String> {
        (0..scenario.agent_count())
            .map(|a| {
                BoundParams::new(
                    scenario.xi(),
                    self.bounds.zeta,
                    scenario.environment().variance_proxies(),
                    scenario.environment().gaps(),
                    scenario.graph().degree(a).map_err(|e| e.to_string())?,
                    scenario.cost(),
                    scenario.horizon(),
                )
                .map_err(|e| e.to_string())
            })
            .collect()
    }

    /// Timesteps that land in the CSV: multiples of `log_every` up to the
    /// horizon.
    pub fn logged_ts(&self) -> Vec<usize> {
        let every = self.output.log_every.max(1);
        (1..=self.horizon / every).map(|k| k * every).collect()
    }
}

/// Flag-level overrides; flags shadow config values, which shadow defaults.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub runs: Option<usize>,
    pub horizon: Option<usize>,
    pub cost: Option<f64>,
    pub xi: Option<f64>,
    pub strategy: Option<StrategyKind>,
    pub p: Option<f64>,
    pub zeta: Option<f64>,
    pub mode: Option<ModeKind>,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub log_every: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ScenarioConfig) {
        if let Some(runs) = self.runs {
            config.runs = runs;
        }
        if let Some(horizon) = self.horizon {
            config.horizon = horizon;
        }
        if let Some(cost) = self.cost {
            config.cost = cost;
        }
        if let Some(xi) = self.xi {
            config.policy.xi = xi;
        }
        if let Some(strategy) = self.strategy {
            config.policy.strategy = strategy;
        }
        if let Some(p) = self.p {
            config.policy.p = Some(p);
        }
        if let Some(zeta) = self.zeta {
            config.bounds.zeta = zeta;
        }
        if let Some(mode) = self.mode {
            config.bounds.mode = mode;
        }
        if let Some(csv) = &self.csv {
            config.output.csv_path = csv.clone();
        }
        if let Some(svg) = &self.svg {
            config.output.svg_path = Some(svg.clone());
        }
        if let Some(log_every) = self.log_every {
            config.output.log_every = log_every;
        }
    }
}

/// Seed precedence: --seed flag, then the config key, then BANDIT_NET_SEED,
/// then 0.
pub fn resolve_seed(flag: Option<u64>, config_seed: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    if let Some(seed) = config_seed {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| format!("{SEED_ENV_VAR}={text} is not a valid u64 seed")),
        Err(_) => Ok(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
cost = 1.0
horizon = 100
runs = 4
seed = 9

[[arms]]
kind = "gaussian"
mean = 1.0
sigma = 2.0

[[arms]]
kind = "gaussian"
mean = 3.0
sigma = 2.0

[graph]
kind = "star"
k = 3

[policy]
xi = 1.01
strategy = "explore-triggered"

[output]
csv_path = "out.csv"
"#;

    #[test]
    fn parses_and_round_trips() {
        let config: ScenarioConfig = toml::from_str(MINIMAL).unwrap();
        assert_eq!(config.bounds.zeta, std::f64::consts::E);
        assert_eq!(config.output.log_every, 10);
        let text = toml::to_string(&config).unwrap();
        let reparsed: ScenarioConfig = toml::from_str(&text).unwrap();
        assert_eq!(config, reparsed);
    }

    #[test]
    fn unknown_keys_are_named() {
        let bad = MINIMAL.replace("cost = 1.0", "cost = 1.0\nfrobnicate = 3");
        let err = toml::from_str::<ScenarioConfig>(&bad)
            .unwrap_err()
            .to_string();
        assert!(
            err.contains("frobnicate"),
            "error should name the key: {err}"
        );
    }

    #[test]
    fn probabilistic_requires_p() {
        let mut config: ScenarioConfig = toml::from_str(MINIMAL).unwrap();
        config.policy.strategy = StrategyKind::Probabilistic;
        assert!(config.strategy().is_err());
        config.policy.p = Some(0.3);
        assert_eq!(
            config.strategy().unwrap(),
            ObservationStrategy::Probabilistic(0.3)
        );
    }

    #[test]
    fn edges_graph_infers_agent_count() {
        let mut config: ScenarioConfig = toml::from_str(MINIMAL).unwrap();
        config.graph = GraphConfig {
            kind: GraphKind::Edges,
            k: None,
            edges: Some(vec![[1, 2], [2, 4]]),
        };
        let g = config.graph().unwrap();
        assert_eq!(g.agent_count(), 4);
        assert_eq!(g.neighbors(1).unwrap(), &[0, 3]);

        // An explicit k must cover every edge endpoint.
        config.graph.k = Some(2);
        assert!(config.graph().is_err());
    }

    #[test]
    fn scenario_builds_from_config() {
        let config: ScenarioConfig = toml::from_str(MINIMAL).unwrap();
        let scenario = config.scenario(9).unwrap();
        assert_eq!(scenario.agent_count(), 3);
        assert_eq!(scenario.horizon(), 100);
        assert_eq!(config.logged_ts().len(), 10);
        let params = config.bound_params(&scenario).unwrap();
        assert_eq!(params.len(), 3);
        assert_eq!(params[0].degree(), 2);
    }
}
