//! Linear-model importance scores for one minipatch: least-squares
//! coefficients and logistic-regression coefficients.

use nalgebra::{Cholesky, DMatrix, DVector};

/// Least-squares coefficients of `x w = y`, minimum-norm when the system is
/// rank-deficient.
///
/// Well-conditioned systems go through the normal equations; anything
/// rank-deficient or close to it falls back to an SVD pseudo-inverse solve,
/// which returns the minimum-norm solution.
pub(crate) fn ols_scores(x: &DMatrix<f64>, y: &DVector<f64>) -> Vec<f64> {
    let m = x.ncols();
    if let Some(w) = solve_normal_equations(x, y) {
        return w;
    }
    let svd = x.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let eps = max_sv * (x.nrows().max(m) as f64) * f64::EPSILON;
    match svd.solve(y, eps) {
        Ok(w) => w.as_slice().to_vec(),
        // All singular values below threshold: no signal to rank.
        Err(_) => vec![0.0; m],
    }
}

fn solve_normal_equations(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<Vec<f64>> {
    let xtx = x.tr_mul(x);
    let chol = Cholesky::new(xtx)?;
    // The Cholesky factor of a near-singular Gram matrix can still "succeed"
    // numerically; reject it so the SVD path preserves the minimum-norm
    // contract on rank-deficient patches.
    let l = chol.l_dirty();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    if !(dmin > dmax * 1e-7) {
        return None;
    }
    let w = chol.solve(&x.tr_mul(y));
    Some(w.as_slice().to_vec())
}

/// Logistic-regression coefficients fit by full-batch gradient descent with
/// a fixed iteration budget: inputs are centered and scaled per patch, an
/// intercept is fit alongside, and no regularization is applied.
///
/// Returns `(scores, degenerate)`; a constant response cannot be fit, so it
/// yields all-zero scores with the degenerate flag set.
pub(crate) fn logistic_scores(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    iterations: usize,
    step_size: f64,
) -> (Vec<f64>, bool) {
    let (n, m) = (x.nrows(), x.ncols());
    let first = y[0];
    if y.iter().all(|&v| v == first) {
        return (vec![0.0; m], true);
    }

    let z = standardize_columns(x);
    let mut w = DVector::<f64>::zeros(m);
    let mut intercept = 0.0f64;
    let inv_n = 1.0 / n as f64;
    for _ in 0..iterations {
        let mut residual = &z * &w;
        residual.add_scalar_mut(intercept);
        residual.apply(|v| *v = sigmoid(*v));
        residual -= y;
        let grad_w = z.tr_mul(&residual) * inv_n;
        let grad_b = residual.sum() * inv_n;
        w.axpy(-step_size, &grad_w, 1.0);
        intercept -= step_size * grad_b;
    }
    (w.iter().map(|v| v.abs()).collect(), false)
}

pub(crate) fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Centers and scales every column to zero mean, unit variance; constant
/// columns become all zeros.
fn standardize_columns(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mut z = x.clone();
    for mut col in z.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
        let var = col.iter().map(|v| v * v).sum::<f64>() / n;
        if var > 0.0 {
            col.scale_mut(1.0 / var.sqrt());
        } else {
            col.fill(0.0);
        }
    }
    z
}
