//! Single CART tree with mean-decrease-in-impurity importance scores.
//!
//! Impurity is variance for regression and Gini for binary classification.
//! Splits are exhaustive midpoints between consecutive distinct values of
//! each feature; ties between candidate splits go to the lowest feature
//! index, then the lowest threshold, so a fit is fully deterministic.

use nalgebra::{DMatrix, DVector};

use crate::data::Task;

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 5,
            min_samples_split: 10,
        }
    }
}

struct BestSplit {
    gain: f64,
    feature: usize,
    /// Smallest value routed to the right child; the partition predicate is
    /// `x < right_value`, which matches the sweep exactly even when the
    /// reported midpoint rounds onto a data value.
    right_value: f64,
}

/// Fits one tree and returns the per-feature sum of impurity decreases, each
/// weighted by the fraction of samples reaching the split node. Features
/// never used in a split score zero.
pub(crate) fn mdi_scores(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    task: Task,
    params: &TreeParams,
) -> Vec<f64> {
    let n_total = x.nrows();
    let mut importance = vec![0.0f64; x.ncols()];
    let root: Vec<usize> = (0..n_total).collect();
    let mut stack = vec![(root, 0usize)];

    while let Some((idx, depth)) = stack.pop() {
        let node_impurity = impurity(y, &idx, task);
        if depth >= params.max_depth
            || idx.len() < params.min_samples_split
            || node_impurity <= 0.0
        {
            continue;
        }
        let Some(split) = best_split(x, y, &idx, node_impurity, task) else {
            continue;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| x[(i, split.feature)] < split.right_value);
        if left.is_empty() || right.is_empty() {
            continue;
        }
        importance[split.feature] += (idx.len() as f64 / n_total as f64) * split.gain;
        stack.push((left, depth + 1));
        stack.push((right, depth + 1));
    }
    importance
}

fn impurity(y: &DVector<f64>, idx: &[usize], task: Task) -> f64 {
    let n = idx.len() as f64;
    match task {
        Task::Regression => {
            let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
            idx.iter().map(|&i| (y[i] - mean).powi(2)).sum::<f64>() / n
        }
        Task::Classification => {
            let p = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
            2.0 * p * (1.0 - p)
        }
    }
}

fn best_split(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    idx: &[usize],
    node_impurity: f64,
    task: Task,
) -> Option<BestSplit> {
    let n = idx.len();
    let n_f = n as f64;
    let total_sum: f64 = idx.iter().map(|&i| y[i]).sum();
    let total_sq: f64 = idx.iter().map(|&i| y[i] * y[i]).sum();
    let mut best: Option<BestSplit> = None;
    let mut sorted = idx.to_vec();

    for feature in 0..x.ncols() {
        sorted.sort_unstable_by(|&a, &b| x[(a, feature)].total_cmp(&x[(b, feature)]));

        // One ascending sweep per feature with running sums; a candidate
        // boundary sits between every pair of distinct consecutive values.
        let mut left_sum = 0.0f64;
        let mut left_sq = 0.0f64;
        for (pos, &i) in sorted.iter().enumerate().take(n - 1) {
            let v = y[i];
            left_sum += v;
            left_sq += v * v;
            let here = x[(i, feature)];
            let next = x[(sorted[pos + 1], feature)];
            if here == next {
                continue;
            }
            let n_left = (pos + 1) as f64;
            let n_right = n_f - n_left;
            let (imp_left, imp_right) = match task {
                Task::Regression => {
                    let right_sum = total_sum - left_sum;
                    let right_sq = total_sq - left_sq;
                    (
                        (left_sq / n_left - (left_sum / n_left).powi(2)).max(0.0),
                        (right_sq / n_right - (right_sum / n_right).powi(2)).max(0.0),
                    )
                }
                Task::Classification => {
                    let p_left = left_sum / n_left;
                    let p_right = (total_sum - left_sum) / n_right;
                    (2.0 * p_left * (1.0 - p_left), 2.0 * p_right * (1.0 - p_right))
                }
            };
            let gain = node_impurity - (n_left / n_f) * imp_left - (n_right / n_f) * imp_right;
            if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    gain,
                    feature,
                    right_value: next,
                });
            }
        }
    }
    best
}
