//! Command-line front end. Exit codes: 0 success, 2 configuration error,
//! 3 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rampart_cli::commands::{
    cmd_generate, cmd_rank, cmd_simulate, cmd_validate_theory, GenPreset, GenerateOpts, RankOpts,
    SimulateOpts, TheoryOpts,
};
use rampart_cli::config::{
    parse_allocation, parse_covariance, parse_scenario, Method, RankerConfig, RankerKind,
};
use rampart_cli::CliError;

use rampart_core::{Allocation, Covariance, Scenario, Task};

const CONFIG_REFERENCE: &str = "\
CONFIG FILE REFERENCE (TOML; unknown keys are hard errors):
  master_seed          u64     root seed; every trial derives its own stream
  trials               int     simulations per grid point (>= 1)
  output_path          path    result CSV (optional; --out overrides)
  methods              list    any of \"rampart\", \"ramp\", \"full-data-baseline\"
  rbo_rho              float   rank-biased-overlap persistence (default 0.7)

  [generator]
  n_obs                int     observations N per dataset
  n_features           int     features M per dataset
  scenarios            list    \"linear-regression\" | \"nonlinear-regression\" |
                               \"linear-classification\" | \"nonlinear-classification\"
  covariances          list    \"identity\" | \"ar1(rho)\" with 0 <= rho < 1
  gammas               list    positive signal-to-noise values

  [ranker]
  kind                 str     \"ols\" | \"logistic\" | \"tree-mdi\" | \"oracle\" | \"noisy-oracle\"
  iterations           int     logistic only (default 200)
  step_size            float   logistic only (default 0.1)
  max_depth            int     tree-mdi only (default 5)
  min_samples_split    int     tree-mdi only (default 10)
  p_correct            float   noisy-oracle only; 0.5 < p <= 1

  [budget]
  total                int     minipatches for the halving estimator
  ramp_total           int     minipatches for the plain ensemble (default: total)
  allocation           str     \"uniform\" | \"geometric\" (default uniform)
  n                    int     observations per minipatch
  m                    int     features per minipatch
  k                    int     target top-k size

Within a trial every method consumes the identical generated dataset; the
per-trial dataset checksum is written to the _timings sidecar. The main
results CSV is byte-identical across runs and thread counts.";

#[derive(Parser)]
#[command(
    name = "rampart",
    version,
    about = "Top-k feature importance ranking with minipatch ensembles and recursive halving"
)]
struct Cli {
    /// Worker threads (default: one per CPU). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation sweep from a TOML config and write result rows.
    #[command(after_help = CONFIG_REFERENCE)]
    Simulate(SimulateArgs),
    /// Success-probability curves over a minipatch-budget grid (paired seeds).
    ValidateTheory(ValidateTheoryArgs),
    /// Rank the features of a CSV dataset with one estimator.
    Rank(RankArgs),
    /// Export a synthetic benchmark dataset (and optionally its ground truth).
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Result CSV path; overrides the config's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides the config's master_seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateTheoryArgs {
    /// Experiment preset.
    #[arg(long, default_value = "appendix-b", value_parser = parse_preset)]
    preset: GenPreset,
    /// Paired-seed trials per budget (>= 2).
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Halving-estimator total budgets, one curve point each.
    #[arg(long, value_delimiter = ',', default_value = "64,256,1024,4096")]
    budgets: Vec<usize>,
    /// The plain ensemble runs with multiplier * B minipatches.
    #[arg(long, default_value_t = 1.0)]
    ramp_budget_multiplier: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    /// Input dataset: one observation per row, response in the last column.
    #[arg(long)]
    data: PathBuf,
    /// Set if the first CSV row carries column names.
    #[arg(long, default_value_t = false)]
    has_header: bool,
    /// Response kind: regression | classification.
    #[arg(long, default_value = "regression", value_parser = parse_task)]
    task: Task,
    /// Ranking procedure: ols | logistic | tree-mdi | oracle | noisy-oracle.
    #[arg(long, value_parser = clap::value_parser!(RankerKind))]
    ranker: RankerKind,
    /// Estimator: rampart | ramp | full-data-baseline.
    #[arg(long, default_value = "rampart", value_parser = clap::value_parser!(Method))]
    method: Method,
    /// Target top-k size.
    #[arg(long)]
    k: usize,
    /// Observations per minipatch.
    #[arg(long, default_value_t = 125)]
    n: usize,
    /// Features per minipatch.
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Total minipatch budget.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// Budget split across halving iterations: uniform | geometric.
    #[arg(long, default_value = "uniform", value_parser = parse_allocation)]
    allocation: Allocation,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ground-truth importances (feature,phi[,rank] CSV); oracle rankers only.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Noisy-oracle per-patch probability of the exact order.
    #[arg(long)]
    p_correct: Option<f64>,
    /// Tree depth limit (tree-mdi).
    #[arg(long)]
    max_depth: Option<usize>,
    /// Minimum node size eligible for a split (tree-mdi).
    #[arg(long)]
    min_samples_split: Option<usize>,
    /// Gradient-descent iterations (logistic).
    #[arg(long)]
    iterations: Option<usize>,
    /// Gradient-descent step size (logistic).
    #[arg(long)]
    step_size: Option<f64>,
    /// Write one CSV per halving iteration into this directory.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Named preset (appendix-b); alternative to the explicit knobs below.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<GenPreset>,
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// identity | ar1(rho).
    #[arg(long, default_value = "identity", value_parser = parse_covariance)]
    covariance: Covariance,
    /// Signal-to-noise parameter of the coefficient ladder.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n_obs: Option<usize>,
    #[arg(long)]
    n_features: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Suppress the CSV header row.
    #[arg(long, default_value_t = false)]
    no_header: bool,
    /// Dataset CSV path (features first, response last).
    #[arg(long)]
    out: PathBuf,
    /// Also write ground truth (feature,phi,rank) here.
    #[arg(long)]
    truth_out: Option<PathBuf>,
}

fn parse_task(s: &str) -> Result<Task, String> {
    match s {
        "regression" => Ok(Task::Regression),
        "classification" => Ok(Task::Classification),
        other => Err(format!(
            "unknown task '{other}' (expected regression or classification)"
        )),
    }
}

fn parse_preset(s: &str) -> Result<GenPreset, String> {
    match s {
        "appendix-b" => Ok(GenPreset::AppendixB),
        other => Err(format!("unknown preset '{other}' (expected appendix-b)")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure {threads} threads: {e}")))?;
    }
    match cli.command {
        Command::Simulate(args) => {
            let out = cmd_simulate(&SimulateOpts {
                config_path: args.config,
                out: args.out,
                seed: args.seed,
            })?;
            println!("wrote {}", out.display());
        }
        Command::ValidateTheory(args) => {
            let GenPreset::AppendixB = args.preset;
            let out = cmd_validate_theory(&TheoryOpts {
                trials: args.trials,
                budgets: args.budgets,
                ramp_budget_multiplier: args.ramp_budget_multiplier,
                master_seed: args.seed,
                out: args.out,
            })?;
            println!("wrote {}", out.display());
        }
        Command::Rank(args) => {
            let mut ranker = RankerConfig::from_kind(args.ranker);
            ranker.p_correct = args.p_correct;
            ranker.max_depth = args.max_depth;
            ranker.min_samples_split = args.min_samples_split;
            ranker.iterations = args.iterations;
            ranker.step_size = args.step_size;
            let out = cmd_rank(&RankOpts {
                data: args.data,
                has_header: args.has_header,
                task: args.task,
                ranker,
                method: args.method,
                k: args.k,
                n: args.n,
                m: args.m,
                budget: args.budget,
                allocation: args.allocation,
                seed: args.seed,
                truth: args.truth,
                trace_dir: args.trace_dir,
                out: args.out,
            })?;
            println!("wrote {}", out.display());
        }
        Command::Generate(args) => {
            let out = cmd_generate(&GenerateOpts {
                preset: args.preset,
                scenario: args.scenario,
                covariance: args.covariance,
                gamma: args.gamma,
                n_obs: args.n_obs,
                n_features: args.n_features,
                seed: args.seed,
                header: !args.no_header,
                out: args.out,
                truth_out: args.truth_out,
            })?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
