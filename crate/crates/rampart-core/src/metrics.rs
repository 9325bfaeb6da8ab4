//! Ranking-quality metrics: truncated rank-biased overlap, exact top-k
//! recovery, and trial aggregation.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Truncated rank-biased overlap between two ranked lists (best first):
///
/// `(1 - rho) * sum_{s=1..k} rho^(s-1) * |est[..s] n truth[..s]| / s`
///
/// The result lies in `[0, 1 - rho^k]`; the upper end is attained exactly
/// when the two length-k prefixes agree element for element.
pub fn rbo(est: &[usize], truth: &[usize], rho: f64, k: usize) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::RhoOutOfRange(rho));
    }
    if k == 0 {
        return Err(Error::ZeroK);
    }
    for list in [est, truth] {
        if list.len() < k {
            return Err(Error::ListTooShort { len: list.len(), k });
        }
        let unique: HashSet<_> = list.iter().collect();
        if unique.len() != list.len() {
            return Err(Error::DuplicateIds);
        }
    }

    let mut seen_est: HashSet<usize> = HashSet::with_capacity(k);
    let mut seen_truth: HashSet<usize> = HashSet::with_capacity(k);
    let mut overlap = 0usize;
    let mut weight = 1.0f64; // rho^(s-1)
    let mut total = 0.0f64;
    for s in 0..k {
        let (e, t) = (est[s], truth[s]);
        if e == t {
            overlap += 1;
        } else {
            if seen_truth.contains(&e) {
                overlap += 1;
            }
            if seen_est.contains(&t) {
                overlap += 1;
            }
        }
        seen_est.insert(e);
        seen_truth.insert(t);
        total += weight * overlap as f64 / (s + 1) as f64;
        weight *= rho;
    }
    Ok((1.0 - rho) * total)
}

/// True iff every true top-k feature receives exactly its true rank.
/// Rank vectors are 0-based, so the true top-k are the features with
/// `true_ranks[j] < k`, which must be tie-free.
pub fn exact_topk(est_ranks: &[usize], true_ranks: &[usize], k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if est_ranks.len() != true_ranks.len() {
        return Err(Error::DimensionMismatch {
            what: "rank vectors",
            expected: true_ranks.len(),
            got: est_ranks.len(),
        });
    }
    let top: Vec<usize> = (0..true_ranks.len())
        .filter(|&j| true_ranks[j] < k)
        .collect();
    let distinct: HashSet<usize> = top.iter().map(|&j| true_ranks[j]).collect();
    if distinct.len() != top.len() {
        return Err(Error::TiedTopK { k });
    }
    Ok(top.iter().all(|&j| est_ranks[j] == true_ranks[j]))
}

/// Sample mean and standard error (`s / sqrt(n)`, sample standard deviation
/// with the n-1 denominator) of per-trial metric values.
pub fn aggregate(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::TooFewTrials(values.len()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// The k features holding ranks `0..k`, ordered best first. Errors if those
/// ranks are not held by exactly k distinct features.
pub fn top_k_by_rank(ranks: &[usize], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let mut slots: Vec<Option<usize>> = vec![None; k];
    for (feature, &r) in ranks.iter().enumerate() {
        if r < k {
            if slots[r].is_some() {
                return Err(Error::TiedTopK { k });
            }
            slots[r] = Some(feature);
        }
    }
    slots
        .into_iter()
        .map(|s| s.ok_or(Error::TiedTopK { k }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent oracle: materialize every prefix pair and intersect.
    fn rbo_brute(est: &[usize], truth: &[usize], rho: f64, k: usize) -> f64 {
        let mut total = 0.0;
        for s in 1..=k {
            let a: std::collections::HashSet<_> = est[..s].iter().collect();
            let b: std::collections::HashSet<_> = truth[..s].iter().collect();
            let overlap = a.intersection(&b).count();
            total += rho.powi(s as i32 - 1) * overlap as f64 / s as f64;
        }
        (1.0 - rho) * total
    }

    #[test]
    fn identical_lists_attain_the_maximum() {
        let list: Vec<usize> = (0..10).collect();
        let value = rbo(&list, &list, 0.7, 10).unwrap();
        assert_abs_diff_eq!(value, 1.0 - 0.7f64.powi(10), epsilon = 1e-12);
    }

    #[test]
    fn disjoint_lists_score_zero() {
        let est: Vec<usize> = (0..5).collect();
        let truth: Vec<usize> = (10..15).collect();
        assert_eq!(rbo(&est, &truth, 0.7, 5).unwrap(), 0.0);
    }

    #[test]
    fn swapped_pair_matches_hand_evaluation() {
        // est = (a, b), truth = (b, a), rho = 0.5, k = 2:
        // (1 - 0.5) * (0.5^0 * 0/1 + 0.5^1 * 2/2) = 0.25.
        assert_abs_diff_eq!(rbo(&[0, 1], &[1, 0], 0.5, 2).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn rbo_rejects_bad_inputs() {
        assert!(matches!(
            rbo(&[0, 1], &[0, 1], 1.0, 2),
            Err(Error::RhoOutOfRange(_))
        ));
        assert!(matches!(
            rbo(&[0, 0], &[0, 1], 0.5, 2),
            Err(Error::DuplicateIds)
        ));
        assert!(matches!(
            rbo(&[0], &[0, 1], 0.5, 2),
            Err(Error::ListTooShort { len: 1, k: 2 })
        ));
    }

    #[test]
    fn exact_topk_requires_every_top_rank_to_match() {
        let truth = vec![0, 1, 2, 3];
        assert!(exact_topk(&truth, &truth, 2).unwrap());
        let swapped = vec![1, 0, 2, 3];
        assert!(!exact_topk(&swapped, &truth, 2).unwrap());
    }

    #[test]
    fn exact_topk_ignores_null_features() {
        // True top-2 correct, two null features swapped.
        let truth = vec![0, 1, 2, 3];
        let est = vec![0, 1, 3, 2];
        assert!(exact_topk(&est, &truth, 2).unwrap());
    }

    #[test]
    fn exact_topk_rejects_tied_top_ranks() {
        // Two features share rank 0 (counting-rule ties).
        let truth = vec![0, 0, 2, 3];
        match exact_topk(&truth, &truth, 2) {
            Err(Error::TiedTopK { k: 2 }) => {}
            other => panic!("expected tie error, got {other:?}"),
        }
    }

    #[test]
    fn aggregate_mean_and_standard_error() {
        let (mean, se) = aggregate(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!((mean, se), (1.0, 0.0));
        let (mean, se) = aggregate(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(mean, 0.5);
        assert_abs_diff_eq!(se, 0.5);
        assert!(matches!(aggregate(&[1.0]), Err(Error::TooFewTrials(1))));
    }

    #[test]
    fn aggregate_matches_known_uniform_moments() {
        use rand::Rng;
        let mut rng = crate::sampling::derive_rng(3, 0);
        let draws: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let (mean, se) = aggregate(&draws).unwrap();
        // Uniform(0,1): mean 1/2, SE ~ sqrt(1/12)/sqrt(1000) ~ 0.0091.
        assert!((mean - 0.5).abs() <= 0.03, "mean {mean}");
        assert!((se - 0.00913).abs() <= 0.001, "se {se}");
    }

    #[test]
    fn top_k_by_rank_orders_best_first() {
        // ranks: feature 2 holds rank 0, feature 0 holds rank 1.
        assert_eq!(top_k_by_rank(&[1, 3, 0, 2], 2).unwrap(), vec![2, 0]);
        // Sentinel-style vectors still resolve the top block.
        assert_eq!(top_k_by_rank(&[4, 0, 4, 1, 4, 2, 3, 4], 4).unwrap(), vec![1, 3, 5, 6]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn two_lists(k_max: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>, usize)> {
            (2usize..=k_max).prop_flat_map(|k| {
                let ids: Vec<usize> = (0..40).collect();
                (
                    proptest::sample::subsequence(ids.clone(), k).prop_shuffle(),
                    proptest::sample::subsequence(ids, k).prop_shuffle(),
                    Just(k),
                )
            })
        }

        proptest! {
            // The incremental evaluation equals the brute-force oracle.
            #[test]
            fn rbo_equals_prefix_materialization(
                (est, truth, k) in two_lists(12),
                rho in 0.05f64..0.95,
            ) {
                let fast = rbo(&est, &truth, rho, k).unwrap();
                let brute = rbo_brute(&est, &truth, rho, k);
                prop_assert!((fast - brute).abs() < 1e-12);
                prop_assert!(fast >= 0.0 && fast <= 1.0 - rho.powi(k as i32) + 1e-12);
            }

            // Replacing a non-overlapping element with the true element at
            // the same depth never lowers the score.
            #[test]
            fn rbo_monotone_under_prefix_correction(
                (est, truth, k) in two_lists(12),
                rho in 0.05f64..0.95,
                depth_raw in 0usize..12,
            ) {
                let depth = depth_raw % k;
                // Only meaningful when the replacement keeps est duplicate-free.
                prop_assume!(!est.contains(&truth[depth]));
                let before = rbo(&est, &truth, rho, k).unwrap();
                let mut fixed = est.clone();
                fixed[depth] = truth[depth];
                let after = rbo(&fixed, &truth, rho, k).unwrap();
                prop_assert!(after >= before - 1e-12);
            }
        }
    }
}
