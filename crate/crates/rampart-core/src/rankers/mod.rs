//! Pluggable ranking procedures: fit a small model on one minipatch and emit
//! within-minipatch 0-based ranks (rank 0 = most important).
//!
//! The oracle rankers take a known global order and restrict it to the patch;
//! they exist so ensembling behavior can be studied with a ranking procedure
//! whose error rate is exactly controlled.

mod linear;
mod tree;

pub(crate) use linear::sigmoid;
pub use tree::TreeParams;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::seq::SliceRandom;

use crate::data::Task;
use crate::error::{Error, Result};
use crate::sampling::RngHandle;

/// A within-minipatch rank vector: a permutation of `0..m_eff`, aligned with
/// the patch's feature order.
pub type RankVector = Vec<usize>;

/// Which model to fit on each minipatch and how.
#[derive(Debug, Clone)]
pub enum RankerSpec {
    /// Absolute least-squares coefficients (minimum-norm on rank-deficient
    /// patches). Regression responses only.
    OlsCoef,
    /// Absolute logistic-regression coefficients fit by full-batch gradient
    /// descent on per-patch standardized inputs. Classification only.
    LogisticCoef { iterations: usize, step_size: f64 },
    /// Mean decrease in impurity from a single CART tree.
    TreeMdi {
        max_depth: usize,
        min_samples_split: usize,
    },
    /// Restriction of a known global rank order to the patch.
    Oracle { true_ranks: Vec<usize> },
    /// Oracle order with probability `p_correct`, otherwise a uniformly
    /// random permutation.
    NoisyOracle {
        true_ranks: Vec<usize>,
        p_correct: f64,
    },
}

impl RankerSpec {
    /// Logistic ranker with the default budget: 200 iterations, step 0.1.
    pub fn logistic() -> Self {
        RankerSpec::LogisticCoef {
            iterations: 200,
            step_size: 0.1,
        }
    }

    /// Tree ranker with the default shape: depth 5, min 10 samples to split.
    pub fn tree_mdi() -> Self {
        let p = TreeParams::default();
        RankerSpec::TreeMdi {
            max_depth: p.max_depth,
            min_samples_split: p.min_samples_split,
        }
    }

    pub fn noisy_oracle(true_ranks: Vec<usize>, p_correct: f64) -> Result<Self> {
        let spec = RankerSpec::NoisyOracle {
            true_ranks,
            p_correct,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            RankerSpec::OlsCoef => "ols",
            RankerSpec::LogisticCoef { .. } => "logistic",
            RankerSpec::TreeMdi { .. } => "tree-mdi",
            RankerSpec::Oracle { .. } => "oracle",
            RankerSpec::NoisyOracle { .. } => "noisy-oracle",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RankerSpec::LogisticCoef {
                iterations,
                step_size,
            } => {
                if *iterations == 0 || !(*step_size > 0.0 && step_size.is_finite()) {
                    return Err(Error::InvalidHyperparameter(format!(
                        "logistic needs iterations >= 1 and step_size > 0, got {iterations}, {step_size}"
                    )));
                }
            }
            RankerSpec::TreeMdi {
                min_samples_split, ..
            } => {
                if *min_samples_split < 2 {
                    return Err(Error::InvalidHyperparameter(format!(
                        "tree-mdi needs min_samples_split >= 2, got {min_samples_split}"
                    )));
                }
            }
            RankerSpec::NoisyOracle { p_correct, .. } => {
                if !(*p_correct > 0.5 && *p_correct <= 1.0) {
                    return Err(Error::PCorrectOutOfRange(*p_correct));
                }
            }
            RankerSpec::OlsCoef | RankerSpec::Oracle { .. } => {}
        }
        Ok(())
    }
}

/// Ranks plus a degeneracy flag, so callers can surface a warning without
/// aborting a long ensemble run.
#[derive(Debug, Clone)]
pub struct PatchRanks {
    pub ranks: RankVector,
    /// Set when the response was constant and scores fell back to all-tied.
    pub degenerate: bool,
}

/// Applies the ranking procedure to one minipatch. `feats` carries the
/// global ids of the patch columns (needed by the oracle rankers); `x_sub`
/// and `y_sub` are the patch slices aligned with it.
pub fn rank_minipatch(
    spec: &RankerSpec,
    x_sub: &DMatrix<f64>,
    y_sub: &DVector<f64>,
    task: Task,
    feats: &[usize],
    rng: &mut RngHandle,
) -> Result<PatchRanks> {
    spec.validate()?;
    if x_sub.ncols() != feats.len() {
        return Err(Error::DimensionMismatch {
            what: "patch feature ids",
            expected: x_sub.ncols(),
            got: feats.len(),
        });
    }
    if y_sub.len() != x_sub.nrows() {
        return Err(Error::DimensionMismatch {
            what: "patch response length",
            expected: x_sub.nrows(),
            got: y_sub.len(),
        });
    }
    check_finite(x_sub, y_sub)?;

    let (scores, degenerate) = match spec {
        RankerSpec::OlsCoef => {
            require_task(task, Task::Regression, "ols")?;
            (linear::ols_scores(x_sub, y_sub), false)
        }
        RankerSpec::LogisticCoef {
            iterations,
            step_size,
        } => {
            require_task(task, Task::Classification, "logistic")?;
            linear::logistic_scores(x_sub, y_sub, *iterations, *step_size)
        }
        RankerSpec::TreeMdi {
            max_depth,
            min_samples_split,
        } => {
            let params = TreeParams {
                max_depth: *max_depth,
                min_samples_split: *min_samples_split,
            };
            (tree::mdi_scores(x_sub, y_sub, task, &params), false)
        }
        RankerSpec::Oracle { true_ranks } => {
            check_feats(true_ranks, feats)?;
            return Ok(PatchRanks {
                ranks: oracle_rank(true_ranks, feats),
                degenerate: false,
            });
        }
        RankerSpec::NoisyOracle {
            true_ranks,
            p_correct,
        } => {
            check_feats(true_ranks, feats)?;
            return Ok(PatchRanks {
                ranks: noisy_oracle_rank(true_ranks, feats, *p_correct, rng)?,
                degenerate: false,
            });
        }
    };
    Ok(PatchRanks {
        ranks: score_to_rank(&scores),
        degenerate,
    })
}

/// Converts importance scores to ranks: descending order of magnitude, ties
/// broken by ascending position.
pub fn score_to_rank(scores: &[f64]) -> RankVector {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].abs().total_cmp(&scores[a].abs()).then(a.cmp(&b)));
    let mut ranks = vec![0usize; scores.len()];
    for (rank, &pos) in order.iter().enumerate() {
        ranks[pos] = rank;
    }
    ranks
}

/// Restricts a global rank order to the given features: the output order is
/// always consistent with the global one (global ties break by feature id).
pub fn oracle_rank(true_ranks: &[usize], feats: &[usize]) -> RankVector {
    let mut order: Vec<usize> = (0..feats.len()).collect();
    order.sort_by(|&a, &b| {
        true_ranks[feats[a]]
            .cmp(&true_ranks[feats[b]])
            .then(feats[a].cmp(&feats[b]))
    });
    let mut ranks = vec![0usize; feats.len()];
    for (rank, &pos) in order.iter().enumerate() {
        ranks[pos] = rank;
    }
    ranks
}

/// Emits the oracle order with probability `p_correct` and a uniformly random
/// permutation otherwise. Requires `0.5 < p_correct <= 1`, i.e., better than
/// random guessing on every comparable pair.
pub fn noisy_oracle_rank(
    true_ranks: &[usize],
    feats: &[usize],
    p_correct: f64,
    rng: &mut RngHandle,
) -> Result<RankVector> {
    if !(p_correct > 0.5 && p_correct <= 1.0) {
        return Err(Error::PCorrectOutOfRange(p_correct));
    }
    let coin: f64 = rng.random();
    if coin < p_correct {
        Ok(oracle_rank(true_ranks, feats))
    } else {
        let mut ranks: Vec<usize> = (0..feats.len()).collect();
        ranks.shuffle(rng);
        Ok(ranks)
    }
}

fn require_task(actual: Task, expected: Task, ranker: &'static str) -> Result<()> {
    if actual != expected {
        return Err(Error::TaskMismatch {
            ranker,
            expected: match expected {
                Task::Regression => "regression",
                Task::Classification => "classification",
            },
        });
    }
    Ok(())
}

fn check_feats(true_ranks: &[usize], feats: &[usize]) -> Result<()> {
    for &f in feats {
        if f >= true_ranks.len() {
            return Err(Error::UnknownFeature {
                feature: f,
                len: true_ranks.len(),
            });
        }
    }
    Ok(())
}

fn check_finite(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    for col in 0..x.ncols() {
        for row in 0..x.nrows() {
            if !x[(row, col)].is_finite() {
                return Err(Error::NonFiniteEntry { row, col });
            }
        }
    }
    for (index, &v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                what: "patch response",
                index,
            });
        }
    }
    Ok(())
}
