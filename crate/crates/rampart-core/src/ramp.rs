//! Minipatch rank averaging: draw B minipatches, rank each one, average every
//! feature's within-patch ranks over the patches containing it, and sort the
//! averages into final 0-based rank estimates over a candidate pool.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rankers::{rank_minipatch, PatchRanks, RankerSpec};
use crate::sampling::{derive_rng, sample_minipatch};

/// Ensemble parameters for one RAMP run.
#[derive(Debug, Clone, Copy)]
pub struct RampParams {
    /// Number of minipatches B.
    pub budget: usize,
    /// Observations per minipatch n.
    pub n_obs: usize,
    /// Features per minipatch m (clamped to the pool size).
    pub m_feats: usize,
    pub master_seed: u64,
    /// Patch b draws its stream from `(master_seed, stream_offset + b)`;
    /// halving iterations use disjoint offsets so later iterations never
    /// perturb earlier ones.
    pub stream_offset: u64,
}

impl RampParams {
    pub fn new(budget: usize, n_obs: usize, m_feats: usize, master_seed: u64) -> Self {
        Self {
            budget,
            n_obs,
            m_feats,
            master_seed,
            stream_offset: 0,
        }
    }
}

/// Per-feature running rank sums and appearance counts over a pool.
#[derive(Debug, Clone)]
pub struct AveragedRanks {
    pool: Vec<usize>,
    sum: Vec<f64>,
    count: Vec<u64>,
}

impl AveragedRanks {
    pub fn new(pool: &[usize]) -> Self {
        Self {
            pool: pool.to_vec(),
            sum: vec![0.0; pool.len()],
            count: vec![0; pool.len()],
        }
    }

    /// Records one within-patch rank for the feature at `pool_pos`.
    pub fn record(&mut self, pool_pos: usize, rank: usize) {
        self.sum[pool_pos] += rank as f64;
        self.count[pool_pos] += 1;
    }

    /// Global feature ids this accumulator covers, ascending.
    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    pub fn count(&self, pool_pos: usize) -> u64 {
        self.count[pool_pos]
    }

    pub fn sum(&self, pool_pos: usize) -> f64 {
        self.sum[pool_pos]
    }

    /// Average within-patch rank, defined only for sampled features.
    pub fn bar_r(&self, pool_pos: usize) -> Option<f64> {
        (self.count[pool_pos] > 0).then(|| self.sum[pool_pos] / self.count[pool_pos] as f64)
    }

    pub fn len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }
}

/// Conditions worth surfacing that must not abort an ensemble run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RampWarning {
    /// Features with appearance count zero, placed after all sampled ones.
    NeverSampled { features: Vec<usize> },
    /// Patches whose response was constant; their ranks fell back to index
    /// order.
    DegenerateResponses { patches: usize },
}

impl std::fmt::Display for RampWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RampWarning::NeverSampled { features } => {
                write!(f, "{} features never sampled (", features.len())?;
                for (i, feat) in features.iter().take(8).enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{feat}")?;
                }
                if features.len() > 8 {
                    write!(f, ", ...")?;
                }
                write!(f, "); they are ranked after all sampled features")
            }
            RampWarning::DegenerateResponses { patches } => write!(
                f,
                "{patches} patches had a constant response; their ranks fell back to index order"
            ),
        }
    }
}

/// Output of one RAMP run over a candidate pool.
#[derive(Debug, Clone)]
pub struct RampResult {
    pub averaged: AveragedRanks,
    /// Final 0-based rank estimates, aligned with the pool order; always a
    /// permutation of `0..pool.len()`.
    pub hat_r: Vec<usize>,
    pub warnings: Vec<RampWarning>,
    /// Minipatches actually evaluated (= budget).
    pub patches_evaluated: usize,
}

impl RampResult {
    /// Rank estimate for a global feature id, if it is in the pool.
    pub fn rank_of(&self, feature: usize) -> Option<usize> {
        let pos = self.averaged.pool().binary_search(&feature).ok()?;
        Some(self.hat_r[pos])
    }
}

/// Runs the minipatch rank-averaging ensemble over `pool`.
///
/// Patch evaluation fans out over the rayon pool; per-patch results are
/// merged in patch-id order, so the output is identical for any worker
/// count given the same seed.
pub fn run_ramp(
    dataset: &Dataset,
    pool: &[usize],
    spec: &RankerSpec,
    params: &RampParams,
) -> Result<RampResult> {
    if params.budget == 0 {
        return Err(Error::ZeroBudget);
    }
    check_pool(pool, dataset.n_features())?;
    spec.validate()?;

    // Indexed collect keeps patch order independent of worker scheduling;
    // accumulation below then merges in patch-id order.
    let per_patch: Vec<(Vec<usize>, PatchRanks)> = (0..params.budget)
        .into_par_iter()
        .map(|b| evaluate_patch(dataset, pool, spec, params, b))
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let mut averaged = AveragedRanks::new(pool);
    let mut index_of = vec![usize::MAX; dataset.n_features()];
    for (pos, &f) in pool.iter().enumerate() {
        index_of[f] = pos;
    }
    let mut degenerate_patches = 0usize;
    for (feats, patch) in &per_patch {
        if patch.degenerate {
            degenerate_patches += 1;
        }
        for (i, &f) in feats.iter().enumerate() {
            averaged.record(index_of[f], patch.ranks[i]);
        }
    }

    let mut warnings = Vec::new();
    let never: Vec<usize> = pool
        .iter()
        .enumerate()
        .filter(|&(pos, _)| averaged.count(pos) == 0)
        .map(|(_, &f)| f)
        .collect();
    if !never.is_empty() {
        warnings.push(RampWarning::NeverSampled { features: never });
    }
    if degenerate_patches > 0 {
        warnings.push(RampWarning::DegenerateResponses {
            patches: degenerate_patches,
        });
    }

    let hat_r = finalize_ranks(&averaged)?;
    Ok(RampResult {
        averaged,
        hat_r,
        warnings,
        patches_evaluated: params.budget,
    })
}

fn evaluate_patch(
    dataset: &Dataset,
    pool: &[usize],
    spec: &RankerSpec,
    params: &RampParams,
    patch_id: usize,
) -> Result<(Vec<usize>, PatchRanks)> {
    let mut rng = derive_rng(params.master_seed, params.stream_offset + patch_id as u64);
    let patch = sample_minipatch(
        pool,
        dataset.n_obs(),
        params.n_obs,
        params.m_feats,
        &mut rng,
        patch_id,
    )?;
    let x = dataset.x();
    let y = dataset.y();
    let x_sub = DMatrix::from_fn(patch.obs.len(), patch.feats.len(), |i, j| {
        x[(patch.obs[i], patch.feats[j])]
    });
    let y_sub = DVector::from_fn(patch.obs.len(), |i, _| y[patch.obs[i]]);
    let ranks = rank_minipatch(spec, &x_sub, &y_sub, dataset.task(), &patch.feats, &mut rng)?;
    Ok((patch.feats, ranks))
}

/// Sorts averaged ranks into final 0-based estimates: ascending `bar_r`,
/// ties by ascending feature position, never-sampled features after all
/// sampled ones (by position).
pub fn finalize_ranks(averaged: &AveragedRanks) -> Result<Vec<usize>> {
    let len = averaged.len();
    if (0..len).all(|pos| averaged.count(pos) == 0) {
        return Err(Error::NoSampledFeatures);
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| match (averaged.bar_r(a), averaged.bar_r(b)) {
        (Some(ra), Some(rb)) => ra.total_cmp(&rb).then(a.cmp(&b)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.cmp(&b),
    });
    let mut hat_r = vec![0usize; len];
    for (rank, &pos) in order.iter().enumerate() {
        hat_r[pos] = rank;
    }
    Ok(hat_r)
}

/// Baseline: apply the ranking procedure once to the full dataset
/// (all observations, all features) and sort its scores.
pub fn rank_full_data(dataset: &Dataset, spec: &RankerSpec, seed: u64) -> Result<PatchRanks> {
    let feats: Vec<usize> = (0..dataset.n_features()).collect();
    let mut rng = derive_rng(seed, 0);
    rank_minipatch(
        spec,
        dataset.x(),
        dataset.y(),
        dataset.task(),
        &feats,
        &mut rng,
    )
}

fn check_pool(pool: &[usize], n_features: usize) -> Result<()> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let in_bounds = pool.iter().all(|&f| f < n_features);
    let sorted_unique = pool.windows(2).all(|w| w[0] < w[1]);
    if !in_bounds || !sorted_unique {
        return Err(Error::InvalidPool { n_features });
    }
    Ok(())
}
