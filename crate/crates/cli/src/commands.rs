//! Subcommand implementations shared between main and the tests.

use std::io::Write;
use std::path::{Path, PathBuf};

use bandit_net::{
    concentration_constants, linear_baseline_observation_regret, run_monte_carlo, AggregateMetrics,
    BoundMode, BoundParams, ObservationStrategy, Scenario,
};

use crate::config::{Overrides, ScenarioConfig};
use crate::output;

/// Errors mapped to exit codes: config problems exit 2, runtime invariant
/// breaches exit 3, I/O failures exit 1.
#[derive(Debug)]
pub enum CmdError {
    Config(String),
    Invariant(String),
    Io(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Invariant(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "config error: {msg}"),
            Self::Invariant(msg) => write!(f, "invariant breach: {msg}"),
            Self::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CmdError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CmdError::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn load_with_overrides(
    config_path: &Path,
    overrides: &Overrides,
) -> Result<ScenarioConfig, CmdError> {
    let mut config = ScenarioConfig::load(config_path).map_err(CmdError::Config)?;
    overrides.apply(&mut config);
    Ok(config)
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

pub fn cmd_run(
    config_path: &Path,
    overrides: &Overrides,
    seed_flag: Option<u64>,
    jobs: Option<usize>,
) -> Result<(), CmdError> {
    let config = load_with_overrides(config_path, overrides)?;
    let seed = crate::config::resolve_seed(seed_flag, config.seed).map_err(CmdError::Config)?;
    let scenario = config.scenario(seed).map_err(CmdError::Config)?;
    let params = config.bound_params(&scenario).map_err(CmdError::Config)?;

    let metrics = with_pool(jobs, || run_monte_carlo(&scenario))?;
    validate_metrics(&scenario, &metrics)?;

    let ts = config.logged_ts();
    let rows = output::build_rows(&scenario, &metrics, &params, config.bounds.mode.into(), &ts)
        .map_err(CmdError::Invariant)?;
    if rows.iter().any(|r| {
        !(r.mean_sampling.is_finite() && r.mean_observation.is_finite() && r.mean_total.is_finite())
    }) {
        return Err(CmdError::Invariant(
            "non-finite value in output rows".into(),
        ));
    }

    let csv_path = PathBuf::from(&config.output.csv_path);
    output::write_csv(&csv_path, &rows).map_err(|e| CmdError::Io(e.to_string()))?;
    println!("wrote {}", csv_path.display());
    if let Some(svg_path) = &config.output.svg_path {
        let svg_path = PathBuf::from(svg_path);
        output::write_svg(&svg_path, &rows).map_err(|e| CmdError::Io(e.to_string()))?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

/// Cheap post-run consistency checks; a failure here means the simulator
/// broke its own accounting.
fn validate_metrics(
    scenario: &Scenario<f64>,
    metrics: &AggregateMetrics<f64>,
) -> Result<(), CmdError> {
    let gaps = scenario.environment().gaps();
    for agent in 0..metrics.agent_count {
        for series in [
            &metrics.mean_sampling[agent],
            &metrics.mean_observation[agent],
        ] {
            if series.iter().any(|x| !x.is_finite()) {
                return Err(CmdError::Invariant(format!(
                    "non-finite regret for agent {}",
                    agent + 1
                )));
            }
            if series.windows(2).any(|w| w[1] < w[0]) {
                return Err(CmdError::Invariant(format!(
                    "cumulative regret decreased for agent {}",
                    agent + 1
                )));
            }
        }
        let recomputed: f64 = gaps
            .iter()
            .zip(&metrics.mean_pull_counts[agent])
            .map(|(g, n)| g * n)
            .sum();
        let reported = metrics.mean_sampling[agent][metrics.horizon - 1];
        if (recomputed - reported).abs() > 1e-9 * reported.abs().max(1.0) {
            return Err(CmdError::Invariant(format!(
                "sampling regret {reported} does not match gap-weighted pulls {recomputed} \
                 for agent {}",
                agent + 1
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Horizon,
    Xi,
    Zeta,
    Cost,
    Degree,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            Self::Horizon => "T",
            Self::Xi => "xi",
            Self::Zeta => "zeta",
            Self::Cost => "c",
            Self::Degree => "dk",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

/// Parse `param=lo:hi:steps` with param in {T, xi, zeta, c, dk}.
pub fn parse_sweep(text: &str) -> Result<Sweep, String> {
    let (name, range) = text
        .split_once('=')
        .ok_or_else(|| format!("sweep must look like T=10:1000:100, got {text}"))?;
    let param = match name {
        "T" => SweepParam::Horizon,
        "xi" => SweepParam::Xi,
        "zeta" => SweepParam::Zeta,
        "c" => SweepParam::Cost,
        "dk" => SweepParam::Degree,
        other => {
            return Err(format!(
                "unknown sweep parameter {other} (T, xi, zeta, c, dk)"
            ))
        }
    };
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("sweep range must be lo:hi:steps, got {range}"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad sweep lo {}", parts[0]))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad sweep hi {}", parts[1]))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad sweep steps {}", parts[2]))?;
    if steps == 0 {
        return Err("sweep needs at least one step".into());
    }
    Ok(Sweep {
        param,
        lo,
        hi,
        steps,
    })
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let span = self.hi - self.lo;
        (0..self.steps)
            .map(|i| self.lo + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

pub const BOUNDS_HEADER: &str = "sweep,value,nu,kappa,tail_bound,eta,pull_bound,sampling_bound,\
observation_bound_as_printed,observation_bound_corrected,total_bound,explore_after_suboptimal,\
explore_after_optimal_as_printed,explore_after_optimal_corrected,linear_always,linear_probabilistic";

/// Tabulate every bound evaluator over the sweep, both modes side by side.
/// Per-arm columns (kappa, eta, pull_bound) use the smallest-positive-gap
/// arm; they print 0 when every arm is optimal.
pub fn bounds_table(
    config: &ScenarioConfig,
    sweep: &Sweep,
    agent_io: usize,
) -> Result<String, CmdError> {
    let scenario_probe = config.scenario(0).map_err(CmdError::Config)?;
    if agent_io == 0 || agent_io > scenario_probe.agent_count() {
        return Err(CmdError::Config(format!(
            "agent {agent_io} out of range 1..={}",
            scenario_probe.agent_count()
        )));
    }
    let base = config
        .bound_params(&scenario_probe)
        .map_err(CmdError::Config)?
        .swap_remove(agent_io - 1);
    let p_linear = config.policy.p.unwrap_or(0.2);

    let min_gap_arm = {
        let gaps = base.gaps();
        (0..gaps.len())
            .filter(|&i| gaps[i] > 0.0)
            .min_by(|&a, &b| gaps[a].partial_cmp(&gaps[b]).unwrap())
    };

    let mut out = String::new();
    out.push_str(BOUNDS_HEADER);
    out.push('\n');
    for value in sweep.values() {
        let mut t = base.horizon();
        let mut params = base.clone();
        match sweep.param {
            SweepParam::Horizon => {
                if value < 1.0 {
                    return Err(CmdError::Config(format!(
                        "swept T must be >= 1, got {value}"
                    )));
                }
                t = value.round() as usize;
            }
            SweepParam::Xi => {
                params = rebuild(&base, Some(value), None, None, None)?;
            }
            SweepParam::Zeta => {
                params = rebuild(&base, None, Some(value), None, None)?;
            }
            SweepParam::Cost => {
                params = rebuild(&base, None, None, Some(value), None)?;
            }
            SweepParam::Degree => {
                if value < 0.0 {
                    return Err(CmdError::Config(format!(
                        "swept dk must be >= 0, got {value}"
                    )));
                }
                params = rebuild(&base, None, None, None, Some(value.round() as usize))?;
            }
        }

        let sigma_ref = params.sigma()[min_gap_arm.unwrap_or(0)];
        let (nu, kappa) = concentration_constants(params.zeta(), sigma_ref)
            .map_err(|e| CmdError::Config(e.to_string()))?;
        let eta = min_gap_arm
            .map(|i| params.exploration_threshold(i, t).expect("suboptimal arm"))
            .unwrap_or(0.0);
        let pull = min_gap_arm
            .map(|i| params.suboptimal_pull_bound(i, t).expect("suboptimal arm"))
            .unwrap_or(0.0);
        let linear_always = linear_baseline_observation_regret(
            ObservationStrategy::Always,
            params.cost(),
            params.degree(),
            t,
        )
        .expect("always is a linear baseline");
        let linear_prob = linear_baseline_observation_regret(
            ObservationStrategy::Probabilistic(p_linear),
            params.cost(),
            params.degree(),
            t,
        )
        .map_err(|e| CmdError::Config(e.to_string()))?;

        use std::fmt::Write as _;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sweep.param.name(),
            value,
            nu,
            kappa,
            params.tail_bound(t),
            eta,
            pull,
            params.sampling_regret_bound(t),
            params.observation_regret_bound(t, BoundMode::AsPrinted),
            params.observation_regret_bound(t, BoundMode::Corrected),
            params.total_regret_bound(t),
            params.explore_after_suboptimal_bound(t),
            params.explore_after_optimal_bound(t, BoundMode::AsPrinted),
            params.explore_after_optimal_bound(t, BoundMode::Corrected),
            linear_always,
            linear_prob
        )
        .expect("string write cannot fail");
    }
    Ok(out)
}

/// New params with one field swapped out; revalidates domains, so sweeping
/// into xi <= 1 or zeta <= 1 is a config error.
fn rebuild(
    base: &BoundParams<f64>,
    xi: Option<f64>,
    zeta: Option<f64>,
    cost: Option<f64>,
    degree: Option<usize>,
) -> Result<BoundParams<f64>, CmdError> {
    BoundParams::new(
        xi.unwrap_or(base.xi()),
        zeta.unwrap_or(base.zeta()),
        base.sigma().to_vec(),
        base.gaps().to_vec(),
        degree.unwrap_or(base.degree()),
        cost.unwrap_or(base.cost()),
        base.horizon(),
    )
    .map_err(|e| CmdError::Config(e.to_string()))
}

pub fn cmd_bounds(
    config_path: &Path,
    overrides: &Overrides,
    sweep_text: &str,
    agent_io: usize,
    out_path: Option<&Path>,
) -> Result<(), CmdError> {
    let config = load_with_overrides(config_path, overrides)?;
    let sweep = parse_sweep(sweep_text).map_err(CmdError::Config)?;
    let table = bounds_table(&config, &sweep, agent_io)?;
    match out_path {
        Some(path) => {
            std::fs::write(path, table).map_err(|e| CmdError::Io(e.to_string()))?;
            println!("wrote {}", path.display());
        }
        None => {
            std::io::stdout()
                .write_all(table.as_bytes())
                .map_err(|e| CmdError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

/// Summary of one strategy's total regret at the horizon.
#[derive(Debug, Clone)]
pub struct StrategySummary {
    pub strategy: ObservationStrategy,
    pub group_mean: f64,
    pub group_se: f64,
    /// Per-agent (mean, se) of total regret, in agent order.
    pub per_agent: Vec<(f64, f64)>,
}

/// Run all four strategies on the same scenario and seeds; returns
/// summaries ranked by group-mean total regret, best first.
pub fn compare_strategies(
    config: &ScenarioConfig,
    seed: u64,
    jobs: Option<usize>,
) -> Result<Vec<StrategySummary>, CmdError> {
    let base = config.scenario(seed).map_err(CmdError::Config)?;
    let p = config.policy.p.unwrap_or(0.2);
    let strategies = [
        ObservationStrategy::ExploreTriggered,
        ObservationStrategy::Always,
        ObservationStrategy::Probabilistic(p),
        ObservationStrategy::Never,
    ];
    let mut summaries = Vec::with_capacity(strategies.len());
    for strategy in strategies {
        let scenario = base
            .with_strategy(strategy)
            .map_err(|e| CmdError::Config(e.to_string()))?;
        let metrics = with_pool(jobs, || run_monte_carlo(&scenario))?;
        summaries.push(summarize(strategy, &metrics));
    }
    summaries.sort_by(|a, b| a.group_mean.partial_cmp(&b.group_mean).unwrap());
    Ok(summaries)
}

fn summarize(strategy: ObservationStrategy, metrics: &AggregateMetrics<f64>) -> StrategySummary {
    let agents = metrics.agent_count;
    let runs = metrics.runs;
    let mut per_agent = Vec::with_capacity(agents);
    for a in 0..agents {
        let totals: Vec<f64> = (0..runs)
            .map(|r| metrics.final_sampling[r][a] + metrics.final_observation[r][a])
            .collect();
        per_agent.push(mean_se(&totals));
    }
    let group: Vec<f64> = (0..runs)
        .map(|r| {
            (0..agents)
                .map(|a| metrics.final_sampling[r][a] + metrics.final_observation[r][a])
                .sum::<f64>()
                / agents as f64
        })
        .collect();
    let (group_mean, group_se) = mean_se(&group);
    StrategySummary {
        strategy,
        group_mean,
        group_se,
        per_agent,
    }
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

pub fn cmd_compare(
    config_path: &Path,
    overrides: &Overrides,
    seed_flag: Option<u64>,
    jobs: Option<usize>,
) -> Result<(), CmdError> {
    let config = load_with_overrides(config_path, overrides)?;
    let seed = crate::config::resolve_seed(seed_flag, config.seed).map_err(CmdError::Config)?;
    let summaries = compare_strategies(&config, seed, jobs)?;

    println!(
        "total regret at T = {} over {} runs (seed {seed}), ranked best-first:",
        config.horizon, config.runs
    );
    println!(
        "{:>4}  {:<22} {:>14} {:>12}",
        "rank", "strategy", "group mean", "se"
    );
    for (rank, s) in summaries.iter().enumerate() {
        println!(
            "{:>4}  {:<22} {:>14.3} {:>12.3}",
            rank + 1,
            s.strategy.label(),
            s.group_mean,
            s.group_se
        );
    }
    println!();
    println!("per-agent mean total regret (se):");
    for s in &summaries {
        let agents: Vec<String> = s
            .per_agent
            .iter()
            .enumerate()
            .map(|(a, (m, se))| format!("agent {} {:.2} ({:.2})", a + 1, m, se))
            .collect();
        println!("  {:<22} {}", s.strategy.label(), agents.join(" | "));
    }
    Ok(())
}
