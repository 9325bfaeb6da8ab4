//! `simulate`: run every configured method over a generator grid with paired
//! per-trial seeds, score the rankings, and write one CSV row per
//! (grid point, method, trial).

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;

use rampart_core::{
    compute_schedule, derive_rng, exact_topk, rank_full_data, rbo, run_ramp, run_rampart,
    top_k_by_rank, Covariance, Dataset, GenConfig, RampParams, RankerSpec, Scenario, SynthDataset,
};

use crate::config::{BudgetConfig, ExperimentConfig, Method};
use crate::report::{
    results_csv_bytes, timings_csv_bytes, timings_path_for, write_atomic, ResultRow,
};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct SimulateOpts {
    pub config_path: PathBuf,
    /// Overrides the config's `output_path`.
    pub out: Option<PathBuf>,
    /// Overrides the config's `master_seed`.
    pub seed: Option<u64>,
}

pub fn cmd_simulate(opts: &SimulateOpts) -> Result<PathBuf, CliError> {
    let mut cfg = ExperimentConfig::from_path(&opts.config_path)?;
    if let Some(seed) = opts.seed {
        cfg.master_seed = seed;
    }
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.output_path.clone())
        .ok_or_else(|| {
            CliError::Config("no output path: set output_path in the config or pass --out".into())
        })?;

    let rows = run_simulate(&cfg)?;
    write_atomic(&out, &results_csv_bytes(&rows))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", out.display())))?;
    let timings = timings_path_for(&out);
    write_atomic(&timings, &timings_csv_bytes(&rows))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", timings.display())))?;
    Ok(out)
}

/// One generator grid point.
#[derive(Debug, Clone, Copy)]
struct GridPoint {
    scenario: Scenario,
    covariance: Covariance,
    gamma: f64,
}

/// Runs the whole sweep in memory. Rows come back sorted by
/// (grid point, method, trial) no matter how trials were scheduled.
pub fn run_simulate(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    let mut grid = Vec::new();
    for s in &cfg.generator.scenarios {
        for c in &cfg.generator.covariances {
            for &gamma in &cfg.generator.gammas {
                grid.push(GridPoint {
                    scenario: s.0,
                    covariance: c.0,
                    gamma,
                });
            }
        }
    }

    let items: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..cfg.trials).map(move |t| (g, t)))
        .collect();

    let mut keyed: Vec<(usize, usize, usize, ResultRow)> = items
        .par_iter()
        .map(|&(g, trial)| run_trial(cfg, &grid[g], g, trial))
        .collect::<Result<Vec<_>, CliError>>()?
        .into_iter()
        .flatten()
        .collect();
    keyed.sort_by_key(|&(g, m, t, _)| (g, m, t));
    Ok(keyed.into_iter().map(|(_, _, _, row)| row).collect())
}

fn run_trial(
    cfg: &ExperimentConfig,
    point: &GridPoint,
    grid_idx: usize,
    trial: usize,
) -> Result<Vec<(usize, usize, usize, ResultRow)>, CliError> {
    // All randomness of a trial flows from (master_seed, trial): one stream
    // seeds the generator, the second seeds every method identically.
    let mut trial_stream = derive_rng(cfg.master_seed, trial as u64);
    let gen_seed = trial_stream.next_u64();
    let method_seed = trial_stream.next_u64();

    let gen_config = GenConfig {
        n_obs: cfg.generator.n_obs,
        n_features: cfg.generator.n_features,
        covariance: point.covariance,
        gamma: point.gamma,
        scenario: point.scenario,
        seed: gen_seed,
    };
    let synth: SynthDataset =
        rampart_core::generate(&gen_config).map_err(|e| CliError::Data(e.to_string()))?;
    let checksum = synth.dataset.checksum();
    let spec = cfg.ranker.build(Some(&synth.truth))?;
    let k = cfg.budget.k;
    let truth_list =
        top_k_by_rank(&synth.truth.ranks, k).map_err(|e| CliError::Data(e.to_string()))?;

    let mut rows = Vec::with_capacity(cfg.methods.len());
    for (method_idx, &method) in cfg.methods.iter().enumerate() {
        let started = Instant::now();
        let (hat_r, patches) =
            run_method(method, &synth.dataset, &spec, &cfg.budget, method_seed)?;
        let wall_time_ms = started.elapsed().as_millis() as u64;

        let est_list = top_k_by_rank(&hat_r, k).map_err(|e| CliError::Data(e.to_string()))?;
        let rbo_value =
            rbo(&est_list, &truth_list, cfg.rbo_rho, k).map_err(|e| CliError::Data(e.to_string()))?;
        let exact = exact_topk(&hat_r, &synth.truth.ranks, k)
            .map_err(|e| CliError::Data(e.to_string()))?;

        rows.push((
            grid_idx,
            method_idx,
            trial,
            ResultRow {
                scenario: point.scenario.to_string(),
                covariance: point.covariance.to_string(),
                gamma: point.gamma,
                method: method.name().to_owned(),
                trial,
                rbo: rbo_value,
                exact_topk: exact,
                wall_time_ms,
                total_minipatches: patches,
                dataset_checksum: checksum,
            },
        ));
    }
    Ok(rows)
}

/// Runs one estimator and returns its global rank vector plus the number of
/// minipatches it consumed.
pub fn run_method(
    method: Method,
    dataset: &Dataset,
    spec: &RankerSpec,
    budget: &BudgetConfig,
    seed: u64,
) -> Result<(Vec<usize>, usize), CliError> {
    let pool: Vec<usize> = (0..dataset.n_features()).collect();
    match method {
        Method::Rampart => {
            let schedule = compute_schedule(
                dataset.n_features(),
                budget.k,
                budget.m,
                budget.total,
                budget.allocation.0,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let result = run_rampart(dataset, spec, &schedule, budget.n, budget.m, budget.k, seed)
                .map_err(|e| CliError::Data(e.to_string()))?;
            Ok((result.hat_r, result.total_patches))
        }
        Method::Ramp => {
            let total = budget.ramp_total.unwrap_or(budget.total);
            let params = RampParams::new(total, budget.n, budget.m, seed);
            let result = run_ramp(dataset, &pool, spec, &params)
                .map_err(|e| CliError::Data(e.to_string()))?;
            Ok((result.hat_r, result.patches_evaluated))
        }
        Method::FullDataBaseline => {
            let out = rank_full_data(dataset, spec, seed)
                .map_err(|e| CliError::Data(e.to_string()))?;
            Ok((out.ranks, 0))
        }
    }
}

/// Reads back a results CSV; used by tests and downstream tooling.
pub fn read_results_csv(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect())
}
