//! `validate-theory`: success-probability curves over a minipatch-budget
//! grid, with the halving estimator and the plain ensemble run on identical
//! per-trial datasets (paired seeds). Success means exactly recovering the
//! ranks of the true top-k features.

use std::path::PathBuf;

use rand::RngCore;
use rayon::prelude::*;

use rampart_core::{
    aggregate, compute_schedule, derive_rng, exact_topk, gen_appendix_b, run_ramp, run_rampart,
    Allocation, RampParams, RankerSpec,
};

use crate::report::{theory_csv_bytes, write_atomic, TheoryRow};
use crate::CliError;

/// The theory-validation preset: 1000 x 160 independent Gaussian features,
/// four signal coefficients, patches of 80 observations x 20 features,
/// target top-4.
const N_PATCH: usize = 80;
const M_PATCH: usize = 20;
const K: usize = 4;

#[derive(Debug, Clone)]
pub struct TheoryOpts {
    pub trials: usize,
    /// Total minipatch budgets for the halving estimator, one curve point each.
    pub budgets: Vec<usize>,
    /// The plain ensemble's budget is `multiplier * B` at each grid point.
    pub ramp_budget_multiplier: f64,
    pub master_seed: u64,
    pub out: PathBuf,
}

pub fn cmd_validate_theory(opts: &TheoryOpts) -> Result<PathBuf, CliError> {
    let rows = run_validate_theory(opts)?;
    write_atomic(&opts.out, &theory_csv_bytes(&rows))
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", opts.out.display())))?;
    Ok(opts.out.clone())
}

pub fn run_validate_theory(opts: &TheoryOpts) -> Result<Vec<TheoryRow>, CliError> {
    if opts.trials < 2 {
        return Err(CliError::Config(
            "validate-theory needs at least 2 trials".to_owned(),
        ));
    }
    if opts.budgets.is_empty() {
        return Err(CliError::Config("budget grid must be nonempty".to_owned()));
    }
    if !(opts.ramp_budget_multiplier > 0.0 && opts.ramp_budget_multiplier.is_finite()) {
        return Err(CliError::Config(
            "ramp budget multiplier must be positive".to_owned(),
        ));
    }
    let mut budgets = opts.budgets.clone();
    budgets.sort_unstable();
    budgets.dedup();

    // per_trial[t][b] = (ramp success, halving success) at budget b.
    // Indexed collect keeps trial order independent of scheduling.
    let per_trial: Vec<Vec<(bool, bool)>> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| run_trial(opts, &budgets, trial))
        .collect::<Vec<Result<_, CliError>>>()
        .into_iter()
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(2 * budgets.len());
    for (method_idx, method) in ["ramp", "rampart"].iter().enumerate() {
        for (b_idx, &budget) in budgets.iter().enumerate() {
            let outcomes: Vec<f64> = per_trial
                .iter()
                .map(|t| {
                    let (ramp_ok, rampart_ok) = t[b_idx];
                    f64::from(if method_idx == 0 { ramp_ok } else { rampart_ok })
                })
                .collect();
            let successes = outcomes.iter().filter(|&&v| v > 0.5).count();
            let (mean, se) = aggregate(&outcomes).map_err(|e| CliError::Data(e.to_string()))?;
            rows.push(TheoryRow {
                method: method.to_string(),
                total_minipatches: if method_idx == 0 {
                    ramp_budget(budget, opts.ramp_budget_multiplier)
                } else {
                    budget
                },
                trials: opts.trials,
                successes,
                success_rate: mean,
                std_error: se,
            });
        }
    }
    Ok(rows)
}

fn run_trial(
    opts: &TheoryOpts,
    budgets: &[usize],
    trial: usize,
) -> Result<Vec<(bool, bool)>, CliError> {
    let mut trial_stream = derive_rng(opts.master_seed, trial as u64);
    let gen_seed = trial_stream.next_u64();
    let method_seed = trial_stream.next_u64();

    let synth = gen_appendix_b(gen_seed);
    let spec = RankerSpec::OlsCoef;
    let truth = &synth.truth.ranks;
    let pool: Vec<usize> = (0..synth.dataset.n_features()).collect();

    budgets
        .iter()
        .map(|&budget| {
            let ramp_total = ramp_budget(budget, opts.ramp_budget_multiplier);
            let params = RampParams::new(ramp_total, N_PATCH, M_PATCH, method_seed);
            let ramp_result = run_ramp(&synth.dataset, &pool, &spec, &params)
                .map_err(|e| CliError::Data(e.to_string()))?;
            let ramp_ok = exact_topk(&ramp_result.hat_r, truth, K)
                .map_err(|e| CliError::Data(e.to_string()))?;

            let schedule = compute_schedule(
                synth.dataset.n_features(),
                K,
                M_PATCH,
                budget,
                Allocation::Uniform,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let rampart_result = run_rampart(
                &synth.dataset,
                &spec,
                &schedule,
                N_PATCH,
                M_PATCH,
                K,
                method_seed,
            )
            .map_err(|e| CliError::Data(e.to_string()))?;
            let rampart_ok = exact_topk(&rampart_result.hat_r, truth, K)
                .map_err(|e| CliError::Data(e.to_string()))?;

            Ok((ramp_ok, rampart_ok))
        })
        .collect()
}

fn ramp_budget(budget: usize, multiplier: f64) -> usize {
    ((budget as f64 * multiplier).round() as usize).max(1)
}
