//! Recursive halving on top of the minipatch ensemble: run the rank-averaging
//! pass on a shrinking candidate pool, keep the better half each round, and
//! report top-k-focused ranks with a sentinel for eliminated features.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::ramp::{run_ramp, RampParams, RampResult};
use crate::rankers::RankerSpec;

/// Budget split across halving iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Allocation {
    /// Even split, remainder to the earliest iterations.
    Uniform,
    /// Budgets proportional to 2^t, so later (smaller-pool) rounds get more.
    Geometric,
}

/// The halving plan: pool sizes and per-iteration minipatch budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalvingSchedule {
    /// Candidate pool size per iteration; starts at M, floor-halves, and
    /// never goes below `stop_size`.
    pub pool_sizes: Vec<usize>,
    /// Minipatch budget per iteration; sums to the configured total.
    pub budgets: Vec<usize>,
    /// Smallest admissible pool: `max(k, min(m, M))`.
    pub stop_size: usize,
}

impl HalvingSchedule {
    pub fn iterations(&self) -> usize {
        self.pool_sizes.len()
    }

    pub fn total_budget(&self) -> usize {
        self.budgets.iter().sum()
    }
}

/// Plans the halving iterations for a pool of `n_features` down to roughly
/// `k` survivors, splitting `total_budget` minipatches across iterations.
///
/// The pool halves while the next size stays at or above
/// `stop_size = max(k, min(m_feats, n_features))`, so the final pool lies in
/// `[stop_size, 2 * stop_size)`, feature subsampling stays meaningful, and at
/// least `k` candidates always survive to the last iteration.
pub fn compute_schedule(
    n_features: usize,
    k: usize,
    m_feats: usize,
    total_budget: usize,
    allocation: Allocation,
) -> Result<HalvingSchedule> {
    if k == 0 || k > n_features {
        return Err(Error::KOutOfRange { k, n_features });
    }
    if m_feats == 0 {
        return Err(Error::ZeroSubsample { n: 1, m: m_feats });
    }
    let stop_size = k.max(m_feats.min(n_features));
    let mut pool_sizes = vec![n_features];
    while pool_sizes.last().unwrap() / 2 >= stop_size {
        pool_sizes.push(pool_sizes.last().unwrap() / 2);
    }
    let iterations = pool_sizes.len();
    if total_budget < iterations {
        return Err(Error::BudgetBelowIterations {
            total: total_budget,
            iterations,
        });
    }
    let budgets = split_budget(total_budget, iterations, allocation);
    Ok(HalvingSchedule {
        pool_sizes,
        budgets,
        stop_size,
    })
}

fn split_budget(total: usize, iterations: usize, allocation: Allocation) -> Vec<usize> {
    match allocation {
        Allocation::Uniform => {
            let base = total / iterations;
            let remainder = total % iterations;
            (0..iterations)
                .map(|t| base + usize::from(t < remainder))
                .collect()
        }
        Allocation::Geometric => {
            // Everyone gets at least one patch; the rest goes out in
            // proportion to 2^t with the remainder to the later rounds.
            let mut budgets = vec![1usize; iterations];
            let spare = total - iterations;
            let weight_sum = (1u128 << iterations) - 1;
            let mut assigned = 0usize;
            for (t, b) in budgets.iter_mut().enumerate() {
                let share = (spare as u128 * (1u128 << t) / weight_sum) as usize;
                *b += share;
                assigned += share;
            }
            let mut leftover = spare - assigned;
            let mut t = iterations;
            while leftover > 0 {
                t = if t == 0 { iterations - 1 } else { t - 1 };
                budgets[t] += 1;
                leftover -= 1;
            }
            budgets
        }
    }
}

/// One halving iteration as recorded in the trace.
#[derive(Debug, Clone)]
pub struct RampartIteration {
    /// Candidate pool entering the iteration, sorted ascending.
    pub pool: Vec<usize>,
    pub result: RampResult,
    /// Features kept for the next iteration.
    pub survivors: Vec<usize>,
}

/// Final output: global rank estimates with eliminated features pinned to the
/// sentinel rank `k`, plus the full per-iteration trace.
#[derive(Debug, Clone)]
pub struct RampartResult {
    /// Length-M rank vector; survivors carry their final-iteration ranks,
    /// everything eliminated earlier carries the sentinel `k`.
    pub hat_r: Vec<usize>,
    pub trace: Vec<RampartIteration>,
    pub schedule: HalvingSchedule,
    /// Total minipatches evaluated, exactly the schedule's budget sum.
    pub total_patches: usize,
    /// The sentinel value written for eliminated features (= k).
    pub sentinel: usize,
}

/// The `next_size` pool features with the smallest rank estimates, sorted
/// ascending by feature id.
pub fn survivors(pool: &[usize], hat_r: &[usize], next_size: usize) -> Vec<usize> {
    debug_assert_eq!(pool.len(), hat_r.len());
    debug_assert!(next_size <= pool.len());
    let mut kept: Vec<usize> = pool
        .iter()
        .zip(hat_r)
        .filter(|&(_, &r)| r < next_size)
        .map(|(&f, _)| f)
        .collect();
    kept.sort_unstable();
    kept
}

/// Runs the full halving loop. Iteration `t` evaluates the current pool with
/// budget `schedule.budgets[t]` and keeps the `schedule.pool_sizes[t + 1]`
/// best features. Stream tags are partitioned per iteration at offsets of
/// `t * max(budgets)`.
pub fn run_rampart(
    dataset: &Dataset,
    spec: &RankerSpec,
    schedule: &HalvingSchedule,
    n_obs: usize,
    m_feats: usize,
    k: usize,
    master_seed: u64,
) -> Result<RampartResult> {
    let n_features = dataset.n_features();
    if k == 0 || k > n_features {
        return Err(Error::KOutOfRange { k, n_features });
    }
    if schedule.pool_sizes.first() != Some(&n_features) {
        return Err(Error::ScheduleMismatch(format!(
            "schedule starts at pool size {:?}, dataset has {} features",
            schedule.pool_sizes.first(),
            n_features
        )));
    }
    if schedule.budgets.len() != schedule.pool_sizes.len() {
        return Err(Error::ScheduleMismatch(format!(
            "{} budgets for {} iterations",
            schedule.budgets.len(),
            schedule.pool_sizes.len()
        )));
    }
    if schedule.pool_sizes.last().copied().unwrap_or(0) < k {
        return Err(Error::ScheduleMismatch(format!(
            "final pool {:?} smaller than k = {k}",
            schedule.pool_sizes.last()
        )));
    }

    let iterations = schedule.iterations();
    let max_budget = *schedule.budgets.iter().max().unwrap() as u64;
    let mut pool: Vec<usize> = (0..n_features).collect();
    let mut trace: Vec<RampartIteration> = Vec::with_capacity(iterations);
    let mut total_patches = 0usize;

    for t in 0..iterations {
        if pool.len() != schedule.pool_sizes[t] {
            return Err(Error::ScheduleMismatch(format!(
                "iteration {t}: pool has {} features, schedule expects {}",
                pool.len(),
                schedule.pool_sizes[t]
            )));
        }
        let params = RampParams {
            budget: schedule.budgets[t],
            n_obs,
            m_feats,
            master_seed,
            stream_offset: t as u64 * max_budget,
        };
        let result = run_ramp(dataset, &pool, spec, &params)?;
        total_patches += result.patches_evaluated;

        let next_size = if t + 1 < iterations {
            schedule.pool_sizes[t + 1]
        } else {
            pool.len()
        };
        let kept = survivors(&pool, &result.hat_r, next_size);
        trace.push(RampartIteration {
            pool: pool.clone(),
            result,
            survivors: kept.clone(),
        });
        pool = kept;
    }

    let last = trace.last().expect("at least one iteration");
    let mut hat_r = vec![k; n_features];
    for (pos, &f) in last.pool.iter().enumerate() {
        hat_r[f] = last.result.hat_r[pos];
    }

    Ok(RampartResult {
        hat_r,
        trace,
        schedule: schedule.clone(),
        total_patches,
        sentinel: k,
    })
}
