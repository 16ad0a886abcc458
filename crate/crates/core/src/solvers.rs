//! Penalized least squares on a subsample, with degrees of freedom.
//!
//! All fits minimize `(1/(2k)) * ||y - X b||^2 + penalty(b)` over the k
//! subsampled rows, where the penalty is one of
//!
//! - ridge: `(lambda/2) ||b||_2^2`, solved in closed form,
//! - lasso: `lambda ||b||_1`, solved by cyclic coordinate descent,
//! - elastic net: `lambda1 ||b||_1 + (lambda2/2) ||b||_2^2`, also coordinate
//!   descent.
//!
//! The degrees of freedom reported in [`FitResult::df`] is the trace of the
//! Jacobian of the in-sample prediction map `y_sub -> X_sub * beta_hat`:
//! `trace[X (X'X + k*lambda*I)^{-1} X']` for ridge, the active-set size for
//! the lasso, and the ridge trace restricted to active columns (with
//! `lambda2`) for the elastic net. [`df_finite_difference_oracle`] evaluates
//! the same trace numerically and is kept independent of the closed forms so
//! the two routes can be checked against each other.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the maximum coefficient change per coordinate-descent sweep.
pub const CD_TOL: f64 = 1e-8;
/// Cap on coordinate-descent sweeps before declaring non-convergence.
pub const CD_MAX_ITER: usize = 100_000;
/// Coefficients above this magnitude count as active. Coordinate descent
/// produces exact zeros; the threshold only guards float dust.
pub const ACTIVE_SET_THRESHOLD: f64 = 1e-10;

/// Which penalty governs a component fit.
///
/// `lambda = f64::INFINITY` is accepted by the ridge and lasso variants and
/// yields the null predictor (`beta = 0`, `df = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyConfig {
    Ridge {
        lambda: f64,
    },
    /// Ridge with `lambda = 0`: the minimum-norm least squares solution.
    Ridgeless,
    Lasso {
        lambda: f64,
    },
    ElasticNet {
        lambda1: f64,
        lambda2: f64,
    },
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        match *self {
            PenaltyConfig::Ridge { lambda } | PenaltyConfig::Lasso { lambda } => {
                check_lambda(lambda, "lambda")
            }
            PenaltyConfig::Ridgeless => Ok(()),
            PenaltyConfig::ElasticNet { lambda1, lambda2 } => {
                check_lambda(lambda1, "lambda1")?;
                if !(lambda2.is_finite() && lambda2 > 0.0) {
                    return Err(SolverError::InvalidInput(format!(
                        "lambda2 must be a positive finite real, got {lambda2}"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn check_lambda(lambda: f64, name: &str) -> Result<(), SolverError> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(SolverError::InvalidInput(format!(
            "{name} must be nonnegative (or +inf), got {lambda}"
        )));
    }
    Ok(())
}

/// One fitted component.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta: DVector<f64>,
    /// Trace of the Jacobian of the in-sample prediction map.
    pub df: f64,
    /// Sorted indices of active coefficients; empty for ridge fits.
    pub active_set: Vec<usize>,
    pub objective_value: f64,
    /// Max-norm violation of the stationarity conditions.
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("coordinate descent did not converge within {iterations} sweeps")]
    NonConvergence {
        iterations: usize,
        /// Last iterate, for diagnostics.
        beta: DVector<f64>,
    },
    #[error("active set changed under perturbation of coordinate {index}; point is not generic")]
    NonGenericPoint { index: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

fn check_inputs(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(), SolverError> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(SolverError::InvalidInput(format!(
            "design matrix must be nonempty, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    if y.len() != x.nrows() {
        return Err(SolverError::InvalidInput(format!(
            "response length {} does not match {} rows",
            y.len(),
            x.nrows()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::InvalidInput(
            "non-finite entries in design or response".into(),
        ));
    }
    Ok(())
}

fn null_fit(x: &DMatrix<f64>, y: &DVector<f64>) -> FitResult {
    let k = x.nrows() as f64;
    FitResult {
        beta: DVector::zeros(x.ncols()),
        df: 0.0,
        active_set: Vec::new(),
        objective_value: y.norm_squared() / (2.0 * k),
        kkt_residual: 0.0,
    }
}

fn primal_factor(x: &DMatrix<f64>, klam: f64) -> Result<Cholesky<f64, Dyn>, SolverError> {
    let p = x.ncols();
    // Materializing the transpose routes the product through the blocked
    // gemm kernel, which is an order of magnitude faster than tr_mul here.
    let mut a = x.transpose() * x;
    for j in 0..p {
        a[(j, j)] += klam;
    }
    a.cholesky().ok_or_else(|| {
        SolverError::Numerical("Cholesky factorization of the gram system failed".into())
    })
}

fn dual_factor(x: &DMatrix<f64>, klam: f64) -> Result<Cholesky<f64, Dyn>, SolverError> {
    let k = x.nrows();
    let mut a = x * x.transpose();
    for i in 0..k {
        a[(i, i)] += klam;
    }
    a.cholesky().ok_or_else(|| {
        SolverError::Numerical("Cholesky factorization of the dual gram system failed".into())
    })
}

/// `trace[(L L')^{-1}]` as the squared Frobenius norm of `L^{-1}`, built one
/// column at a time by forward substitution in axpy form so all inner loops
/// walk contiguous columns of `L`.
fn trace_of_inverse(chol: &Cholesky<f64, Dyn>) -> f64 {
    let l = chol.l_dirty();
    let q = l.nrows();
    let data = l.as_slice();
    let mut work = vec![0.0f64; q];
    let mut trace = 0.0;
    for j in 0..q {
        work[j..].fill(0.0);
        work[j] = 1.0;
        for t in j..q {
            let wt = work[t] / data[t * q + t];
            work[t] = wt;
            if wt != 0.0 {
                let col = &data[t * q..(t + 1) * q];
                for i in (t + 1)..q {
                    work[i] -= wt * col[i];
                }
            }
            trace += wt * wt;
        }
    }
    trace
}

/// `trace[X (X'X + k*lambda*I)^{-1} X']` through whichever gram system is
/// smaller; the `k*lambda = 0` case returns the numerical rank from an SVD
/// with cutoff `s_max * max(rows, cols) * eps`.
fn smoother_trace(x: &DMatrix<f64>, k: usize, lambda: f64) -> Result<f64, SolverError> {
    let (rows, cols) = (x.nrows(), x.ncols());
    if cols == 0 {
        return Ok(0.0);
    }
    let klam = k as f64 * lambda;
    if klam == 0.0 {
        let svd = x.clone().svd(false, false);
        return Ok(svd_rank(&svd.singular_values, rows, cols) as f64);
    }
    if cols <= rows {
        let chol = primal_factor(x, klam)?;
        Ok(cols as f64 - klam * trace_of_inverse(&chol))
    } else {
        let chol = dual_factor(x, klam)?;
        Ok(rows as f64 - klam * trace_of_inverse(&chol))
    }
}

fn svd_rank(singular_values: &DVector<f64>, rows: usize, cols: usize) -> usize {
    let smax = singular_values.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let cutoff = smax * rows.max(cols) as f64 * f64::EPSILON;
    singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Ridge fit. `lambda = 0` returns the Moore-Penrose (minimum-norm) solution
/// and `lambda = +inf` the null predictor.
pub fn fit_ridge(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
) -> Result<FitResult, SolverError> {
    check_inputs(x, y)?;
    check_lambda(lambda, "lambda")?;
    if lambda.is_infinite() {
        return Ok(null_fit(x, y));
    }
    let (k, p) = (x.nrows(), x.ncols());
    let kf = k as f64;

    let (beta, df) = if lambda > 0.0 {
        let klam = kf * lambda;
        if p <= k {
            let chol = primal_factor(x, klam)?;
            let beta = chol.solve(&x.tr_mul(y));
            let df = p as f64 - klam * trace_of_inverse(&chol);
            (beta, df)
        } else {
            let chol = dual_factor(x, klam)?;
            let alpha = chol.solve(y);
            let beta = x.tr_mul(&alpha);
            let df = kf - klam * trace_of_inverse(&chol);
            (beta, df)
        }
    } else {
        // Minimum-norm solution via SVD pseudoinverse.
        let svd = x.clone().svd(true, true);
        let u = svd.u.as_ref().expect("svd with u requested");
        let v_t = svd.v_t.as_ref().expect("svd with v_t requested");
        let rank = svd_rank(&svd.singular_values, k, p);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let cutoff = smax * k.max(p) as f64 * f64::EPSILON;
        let mut z = u.tr_mul(y);
        for (i, s) in svd.singular_values.iter().enumerate() {
            z[i] = if *s > cutoff { z[i] / s } else { 0.0 };
        }
        (v_t.tr_mul(&z), rank as f64)
    };

    let residual = y - x * &beta;
    let mut grad = x.tr_mul(&residual);
    grad /= -kf;
    grad += lambda * &beta;
    let objective = residual.norm_squared() / (2.0 * kf) + 0.5 * lambda * beta.norm_squared();
    Ok(FitResult {
        beta,
        df,
        active_set: Vec::new(),
        objective_value: objective,
        kkt_residual: grad.amax(),
    })
}

/// Lasso fit by cyclic coordinate descent.
pub fn fit_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
) -> Result<FitResult, SolverError> {
    fit_lasso_warm(x, y, lambda, None)
}

/// Lasso fit that can resume from a previous solution on the same design,
/// typically the fit at the next larger penalty on a lambda path.
pub fn fit_lasso_warm(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    warm: Option<&DVector<f64>>,
) -> Result<FitResult, SolverError> {
    check_inputs(x, y)?;
    check_lambda(lambda, "lambda")?;
    if lambda.is_infinite() {
        return Ok(null_fit(x, y));
    }
    let beta = coordinate_descent(x, y, lambda, 0.0, warm)?;
    let active_set = active_set_of(&beta);
    let df = active_set.len() as f64;
    finish_cd_fit(x, y, lambda, 0.0, beta, active_set, df)
}

/// Elastic net fit by cyclic coordinate descent. Requires `lambda2 > 0`.
pub fn fit_elastic_net(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda1: f64,
    lambda2: f64,
) -> Result<FitResult, SolverError> {
    fit_elastic_net_warm(x, y, lambda1, lambda2, None)
}

pub fn fit_elastic_net_warm(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda1: f64,
    lambda2: f64,
    warm: Option<&DVector<f64>>,
) -> Result<FitResult, SolverError> {
    check_inputs(x, y)?;
    PenaltyConfig::ElasticNet { lambda1, lambda2 }.validate()?;
    if lambda1.is_infinite() {
        return Ok(null_fit(x, y));
    }
    let beta = coordinate_descent(x, y, lambda1, lambda2, warm)?;
    let active_set = active_set_of(&beta);
    let x_active = x.select_columns(active_set.iter());
    let df = smoother_trace(&x_active, x.nrows(), lambda2)?;
    finish_cd_fit(x, y, lambda1, lambda2, beta, active_set, df)
}

fn active_set_of(beta: &DVector<f64>) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| b.abs() > ACTIVE_SET_THRESHOLD)
        .map(|(j, _)| j)
        .collect()
}

fn finish_cd_fit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda1: f64,
    lambda2: f64,
    beta: DVector<f64>,
    active_set: Vec<usize>,
    df: f64,
) -> Result<FitResult, SolverError> {
    let kf = x.nrows() as f64;
    let residual = y - x * &beta;
    let correlations = x.tr_mul(&residual) / kf;
    // Stationarity: (1/k) x_j' r = lambda1 * sign(beta_j) + lambda2 * beta_j
    // on the active set, |(1/k) x_j' r| <= lambda1 off it.
    let mut kkt: f64 = 0.0;
    for j in 0..beta.len() {
        let g = correlations[j];
        let violation = if beta[j].abs() > ACTIVE_SET_THRESHOLD {
            (g - lambda1 * beta[j].signum() - lambda2 * beta[j]).abs()
        } else {
            (g.abs() - lambda1).max(0.0)
        };
        kkt = kkt.max(violation);
    }
    let objective = residual.norm_squared() / (2.0 * kf)
        + lambda1 * beta.iter().map(|b| b.abs()).sum::<f64>()
        + 0.5 * lambda2 * beta.norm_squared();
    Ok(FitResult {
        beta,
        df,
        active_set,
        objective_value: objective,
        kkt_residual: kkt,
    })
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Cyclic coordinate descent on
/// `(1/(2k)) ||y - X b||^2 + lambda1 ||b||_1 + (lambda2/2) ||b||_2^2`,
/// stopping when the largest coefficient change in a sweep drops below
/// [`CD_TOL`].
fn coordinate_descent(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda1: f64,
    lambda2: f64,
    warm: Option<&DVector<f64>>,
) -> Result<DVector<f64>, SolverError> {
    let (k, p) = (x.nrows(), x.ncols());
    let kf = k as f64;
    if let Some(w) = warm {
        if w.len() != p {
            return Err(SolverError::InvalidInput(format!(
                "warm start length {} does not match {} columns",
                w.len(),
                p
            )));
        }
    }
    let col_sq: Vec<f64> = (0..p).map(|j| x.column(j).norm_squared() / kf).collect();
    let mut beta = warm.cloned().unwrap_or_else(|| DVector::zeros(p));
    let mut residual = y - x * &beta;
    for sweep in 1..=CD_MAX_ITER {
        let mut max_delta: f64 = 0.0;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                if beta[j] != 0.0 {
                    residual.axpy(beta[j], &x.column(j), 1.0);
                    max_delta = max_delta.max(beta[j].abs());
                    beta[j] = 0.0;
                }
                continue;
            }
            let rho = x.column(j).dot(&residual) / kf + col_sq[j] * beta[j];
            let updated = soft_threshold(rho, lambda1) / (col_sq[j] + lambda2);
            let delta = updated - beta[j];
            if delta != 0.0 {
                residual.axpy(-delta, &x.column(j), 1.0);
                beta[j] = updated;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < CD_TOL {
            return Ok(beta);
        }
        let _ = sweep;
    }
    Err(SolverError::NonConvergence {
        iterations: CD_MAX_ITER,
        beta,
    })
}

/// Fits with whichever penalty `config` selects.
pub fn fit_penalized(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    config: &PenaltyConfig,
) -> Result<FitResult, SolverError> {
    fit_penalized_warm(x, y, config, None)
}

/// Like [`fit_penalized`], with an optional warm start for the coordinate
/// descent penalties (ignored by ridge).
pub fn fit_penalized_warm(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    config: &PenaltyConfig,
    warm: Option<&DVector<f64>>,
) -> Result<FitResult, SolverError> {
    config.validate()?;
    match *config {
        PenaltyConfig::Ridge { lambda } => fit_ridge(x, y, lambda),
        PenaltyConfig::Ridgeless => fit_ridge(x, y, 0.0),
        PenaltyConfig::Lasso { lambda } => fit_lasso_warm(x, y, lambda, warm),
        PenaltyConfig::ElasticNet { lambda1, lambda2 } => {
            fit_elastic_net_warm(x, y, lambda1, lambda2, warm)
        }
    }
}

/// Numerical trace of the Jacobian of the prediction map, by forward
/// differences: `sum_i [(X beta(y + eps e_i))_i - (X beta(y))_i] / eps` over
/// the subsample coordinates.
///
/// Fails with [`SolverError::NonGenericPoint`] if any perturbation changes
/// the fitted active set, in which case the prediction map is not
/// differentiable at `y` and the trace is undefined there.
pub fn df_finite_difference_oracle<F>(
    fitter: F,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    eps: f64,
) -> Result<f64, SolverError>
where
    F: Fn(&DMatrix<f64>, &DVector<f64>) -> Result<FitResult, SolverError>,
{
    if !(eps.is_finite() && eps > 0.0) {
        return Err(SolverError::InvalidInput(format!(
            "eps must be a positive real, got {eps}"
        )));
    }
    check_inputs(x, y)?;
    let base = fitter(x, y)?;
    let base_pred = x * &base.beta;
    let mut trace = 0.0;
    let mut y_pert = y.clone();
    for i in 0..y.len() {
        y_pert[i] = y[i] + eps;
        let perturbed = fitter(x, &y_pert)?;
        if perturbed.active_set != base.active_set {
            return Err(SolverError::NonGenericPoint { index: i });
        }
        let pred_i = x.row(i).transpose().dot(&perturbed.beta);
        trace += (pred_i - base_pred[i]) / eps;
        y_pert[i] = y[i];
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn ridge_diagonal_closed_form() {
        // X = I_2, y = (2, 4), lambda = 0.5: beta = (X'X/k + lambda I)^{-1} X'y/k
        // with k = 2 reduces to (1/2 + 1/2)^{-1} y/2 = (1, 2).
        let x = DMatrix::identity(2, 2);
        let y = DVector::from_vec(vec![2.0, 4.0]);
        let fit = fit_ridge(&x, &y, 0.5).unwrap();
        assert!((fit.beta[0] - 1.0).abs() < 1e-12);
        assert!((fit.beta[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ridge_infinite_penalty_is_null_predictor() {
        let x = mat(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let y = DVector::from_vec(vec![1.0, -1.0, 2.0]);
        let fit = fit_ridge(&x, &y, f64::INFINITY).unwrap();
        assert_eq!(fit.beta, DVector::zeros(2));
        assert_eq!(fit.df, 0.0);
        assert!((fit.objective_value - y.norm_squared() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn ridge_rejects_bad_inputs() {
        let x = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, f64::NAN]);
        assert!(matches!(
            fit_ridge(&x, &y, 1.0),
            Err(SolverError::InvalidInput(_))
        ));
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(
            fit_ridge(&x, &y, -0.1),
            Err(SolverError::InvalidInput(_))
        ));
    }

    #[test]
    fn ridgeless_wide_matches_dual_closed_form() {
        // Full row rank wide system: minimum-norm solution X'(XX')^{-1} y.
        let x = mat(2, 4, &[1.0, 0.5, -0.3, 2.0, 0.0, 1.5, 1.0, -1.0]);
        let y = DVector::from_vec(vec![1.0, -2.0]);
        let fit = fit_ridge(&x, &y, 0.0).unwrap();
        let gram = &x * x.transpose();
        let expected = x.tr_mul(&gram.cholesky().unwrap().solve(&y));
        assert!((&fit.beta - expected).amax() < 1e-12);
        assert_eq!(fit.df, 2.0);
        // Interpolation holds when k <= rank.
        assert!((&x * &fit.beta - &y).amax() < 1e-12);
    }

    #[test]
    fn lasso_full_shrinkage_threshold() {
        let x = mat(
            4,
            3,
            &[
                1.0, 0.2, 0.1, -0.5, 1.0, 0.3, 0.7, -0.2, 1.0, 0.1, 0.4, -0.6,
            ],
        );
        let y = DVector::from_vec(vec![1.0, -1.0, 0.5, 0.2]);
        let k = 4.0;
        let lambda_max = (x.tr_mul(&y) / k).amax();
        let fit = fit_lasso(&x, &y, lambda_max * 1.0001).unwrap();
        assert_eq!(fit.beta, DVector::zeros(3));
        assert_eq!(fit.df, 0.0);
        assert!(fit.active_set.is_empty());
    }

    #[test]
    fn lasso_infinite_penalty_is_null_predictor() {
        let x = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let y = DVector::from_vec(vec![3.0, -4.0]);
        let fit = fit_lasso(&x, &y, f64::INFINITY).unwrap();
        assert_eq!(fit.beta, DVector::zeros(2));
        assert_eq!(fit.df, 0.0);
    }

    #[test]
    fn elastic_net_large_l1_is_null() {
        let x = mat(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let fit = fit_elastic_net(&x, &y, 100.0, 0.5).unwrap();
        assert_eq!(fit.beta, DVector::zeros(2));
        assert_eq!(fit.df, 0.0);
    }

    #[test]
    fn elastic_net_requires_positive_lambda2() {
        let x = DMatrix::identity(2, 2);
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(
            fit_elastic_net(&x, &y, 0.1, 0.0),
            Err(SolverError::InvalidInput(_))
        ));
    }

    #[test]
    fn penalty_config_serde_round_trip() {
        let configs = [
            PenaltyConfig::Ridge { lambda: 1.5 },
            PenaltyConfig::Ridgeless,
            PenaltyConfig::Lasso { lambda: 0.1 },
            PenaltyConfig::ElasticNet {
                lambda1: 0.1,
                lambda2: 0.01,
            },
        ];
        for c in configs {
            let s = serde_json::to_string(&c).unwrap();
            let back: PenaltyConfig = serde_json::from_str(&s).unwrap();
            assert_eq!(c, back);
        }
    }

    #[test]
    fn trace_of_inverse_matches_dense_inverse() {
        let x = mat(
            6,
            4,
            &[
                1.0, 0.2, -0.3, 0.5, 0.7, 1.1, 0.0, -0.2, 0.3, -0.4, 1.3, 0.6, -0.9, 0.8, 0.25,
                1.7, 0.45, -0.6, 0.15, 0.9, 1.05, 0.35, -0.75, 0.55,
            ],
        );
        let chol = primal_factor(&x, 0.8).unwrap();
        let direct = chol.inverse().trace();
        assert!((trace_of_inverse(&chol) - direct).abs() < 1e-12);
    }

    #[test]
    fn finite_difference_rejects_bad_eps() {
        let x = DMatrix::identity(2, 2);
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(
            df_finite_difference_oracle(|x, y| fit_ridge(x, y, 1.0), &x, &y, 0.0),
            Err(SolverError::InvalidInput(_))
        ));
    }
}
