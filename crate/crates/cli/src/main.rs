//! Command-line front end: `run`, `bounds`, and `compare` over a scenario
//! config. Exit codes: 0 success, 2 config error, 3 runtime invariant
//! breach, 1 other I/O failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use bandit_net_cli::commands;
use bandit_net_cli::config::{ModeKind, Overrides, StrategyKind};

#[derive(Parser)]
#[command(
    name = "bandit-net",
    version,
    about = "Multi-agent bandit simulator with costly neighbor observation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment and write a CSV (plus optional SVG).
    Run(RunArgs),
    /// Tabulate the closed-form bound evaluators over a parameter sweep.
    Bounds(BoundsArgs),
    /// Run all four observation strategies on the same scenario and seeds,
    /// ranked by total regret.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SharedOverrides {
    /// Monte Carlo runs (overrides the config)
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed (overrides config seed and BANDIT_NET_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Horizon T
    #[arg(long)]
    horizon: Option<usize>,
    /// Per-neighbor observation cost c
    #[arg(long)]
    cost: Option<f64>,
    /// UCB tuning parameter (must exceed 1)
    #[arg(long)]
    xi: Option<f64>,
    /// Observation strategy
    #[arg(long, value_enum)]
    strategy: Option<StrategyKind>,
    /// Observation probability for the probabilistic strategy (also the
    /// baseline probability used by bounds/compare when unset: 0.2)
    #[arg(long)]
    p: Option<f64>,
    /// Concentration analysis parameter (must exceed 1; default e)
    #[arg(long)]
    zeta: Option<f64>,
    /// Bound form for the statements with suspected typos
    #[arg(long, value_enum)]
    mode: Option<ModeKind>,
    /// Worker threads for Monte Carlo runs (output is identical for any
    /// value; default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

impl SharedOverrides {
    fn to_overrides(&self) -> Overrides {
        Overrides {
            runs: self.runs,
            horizon: self.horizon,
            cost: self.cost,
            xi: self.xi,
            strategy: self.strategy,
            p: self.p,
            zeta: self.zeta,
            mode: self.mode,
            ..Overrides::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (TOML)
    config: PathBuf,
    #[command(flatten)]
    shared: SharedOverrides,
    /// CSV output path (overrides the config)
    #[arg(long)]
    csv: Option<String>,
    /// SVG output path (overrides the config)
    #[arg(long)]
    svg: Option<String>,
    /// Log every N timesteps
    #[arg(long)]
    log_every: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Scenario config file (TOML)
    config: PathBuf,
    /// Sweep spec `param=lo:hi:steps` with param in {T, xi, zeta, c, dk}
    #[arg(long)]
    sweep: String,
    /// 1-based agent whose degree parameterizes the bounds
    #[arg(long, default_value_t = 1)]
    agent: usize,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: SharedOverrides,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario config file (TOML)
    config: PathBuf,
    #[command(flatten)]
    shared: SharedOverrides,
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => {
            let mut overrides = args.shared.to_overrides();
            overrides.csv = args.csv.clone();
            overrides.svg = args.svg.clone();
            overrides.log_every = args.log_every;
            commands::cmd_run(&args.config, &overrides, args.shared.seed, args.shared.jobs)
        }
        Command::Bounds(args) => commands::cmd_bounds(
            &args.config,
            &args.shared.to_overrides(),
            &args.sweep,
            args.agent,
            args.out.as_deref(),
        ),
        Command::Compare(args) => commands::cmd_compare(
            &args.config,
            &args.shared.to_overrides(),
            args.shared.seed,
            args.shared.jobs,
        ),
    };
    if let Err(error) = result {
        eprintln!("{error}");
        std::process::exit(error.exit_code());
    }
}
