//! Ground-truth prediction risk, exact under a known linear oracle and
//! empirical on a held-out test set otherwise.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::data::TestSet;
use crate::ensemble::EnsembleFit;

/// The data-generating quantities that determine conditional risk exactly:
/// feature covariance, best linear projection coefficient, and the energy of
/// the response component not explained by the linear projection.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModelOracle {
    pub sigma: DMatrix<f64>,
    pub beta0: DVector<f64>,
    pub sigma2: f64,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid oracle: {0}")]
    Invalid(String),
}

impl LinearModelOracle {
    pub fn new(sigma: DMatrix<f64>, beta0: DVector<f64>, sigma2: f64) -> Result<Self, OracleError> {
        if sigma.nrows() != sigma.ncols() {
            return Err(OracleError::Invalid(format!(
                "covariance must be square, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if sigma.nrows() != beta0.len() {
            return Err(OracleError::Invalid(format!(
                "covariance dimension {} does not match coefficient length {}",
                sigma.nrows(),
                beta0.len()
            )));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(OracleError::Invalid(format!(
                "noise energy must be positive, got {sigma2}"
            )));
        }
        Ok(Self {
            sigma,
            beta0,
            sigma2,
        })
    }

    pub fn p(&self) -> usize {
        self.beta0.len()
    }
}

/// Exact (m, l) risk component:
/// `(beta_m - beta0)' Sigma (beta_l - beta0) + sigma2`.
pub fn risk_component(
    oracle: &LinearModelOracle,
    beta_m: &DVector<f64>,
    beta_l: &DVector<f64>,
) -> f64 {
    let dm = beta_m - &oracle.beta0;
    let dl = beta_l - &oracle.beta0;
    dm.dot(&(&oracle.sigma * dl)) + oracle.sigma2
}

/// Conditional squared prediction risk of the averaged predictor. Equals the
/// average of all pairwise [`risk_component`] values by bilinearity.
pub fn true_risk(oracle: &LinearModelOracle, fit: &EnsembleFit) -> f64 {
    risk_component(oracle, &fit.ensemble_beta, &fit.ensemble_beta)
}

/// Mean squared prediction error on a held-out test set.
pub fn empirical_risk(test: &TestSet, fit: &EnsembleFit) -> f64 {
    let residual = &test.y - &test.x * &fit.ensemble_beta;
    residual.norm_squared() / test.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{EnsembleComponent, IndexSet};
    use crate::solvers::FitResult;

    fn oracle(p: usize, sigma2: f64) -> LinearModelOracle {
        LinearModelOracle::new(DMatrix::identity(p, p), DVector::zeros(p), sigma2).unwrap()
    }

    fn ensemble_of_betas(betas: Vec<DVector<f64>>, n: usize) -> EnsembleFit {
        let components = betas
            .into_iter()
            .map(|beta| EnsembleComponent {
                indices: IndexSet::full(n),
                fit: FitResult {
                    beta,
                    df: 0.0,
                    active_set: Vec::new(),
                    objective_value: 0.0,
                    kkt_residual: 0.0,
                },
                full_residual: DVector::zeros(n),
            })
            .collect();
        EnsembleFit::from_components(components, n).unwrap()
    }

    #[test]
    fn component_at_truth_is_noise_energy() {
        let mut o = oracle(3, 1.7);
        o.beta0 = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        assert_eq!(risk_component(&o, &o.beta0.clone(), &o.beta0.clone()), 1.7);
    }

    #[test]
    fn orthogonal_errors_leave_only_noise() {
        let o = oracle(3, 2.0);
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let e2 = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        assert_eq!(risk_component(&o, &e1, &e2), 2.0);
    }

    #[test]
    fn quadratic_form_matches_naive_double_loop() {
        let p = 5;
        let sigma = DMatrix::from_fn(p, p, |i, j| 0.5f64.powi((i as i32 - j as i32).abs()) * 2.0);
        let beta0 = DVector::from_fn(p, |i, _| (i as f64 * 0.31).sin());
        let o = LinearModelOracle::new(sigma.clone(), beta0.clone(), 0.9).unwrap();
        let bm = DVector::from_fn(p, |i, _| (i as f64 * 0.77).cos());
        let bl = DVector::from_fn(p, |i, _| (i as f64 * 0.41).sin() - 0.2);
        let mut direct = 0.0;
        for i in 0..p {
            for j in 0..p {
                direct += (bm[i] - beta0[i]) * sigma[(i, j)] * (bl[j] - beta0[j]);
            }
        }
        direct += 0.9;
        assert!((risk_component(&o, &bm, &bl) - direct).abs() < 1e-14);
        // Symmetric in the two coefficient vectors.
        assert!((risk_component(&o, &bm, &bl) - risk_component(&o, &bl, &bm)).abs() < 1e-14);
    }

    #[test]
    fn zero_ensemble_at_zero_truth_has_noise_risk() {
        let o = oracle(4, 1.3);
        let fit = ensemble_of_betas(vec![DVector::zeros(4)], 6);
        assert_eq!(true_risk(&o, &fit), 1.3);
    }

    #[test]
    fn risk_decomposes_over_components() {
        let p = 4;
        let sigma = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 + i as f64 } else { 0.3 });
        let beta0 = DVector::from_fn(p, |i, _| 0.1 * i as f64);
        let o = LinearModelOracle::new(sigma, beta0, 0.5).unwrap();
        let betas: Vec<DVector<f64>> = (0..3)
            .map(|m| DVector::from_fn(p, |i, _| ((m * p + i) as f64 * 0.37).sin()))
            .collect();
        let fit = ensemble_of_betas(betas.clone(), 5);
        let mut pairwise = 0.0;
        for bm in &betas {
            for bl in &betas {
                pairwise += risk_component(&o, bm, bl);
            }
        }
        pairwise /= 9.0;
        assert!((true_risk(&o, &fit) - pairwise).abs() < 1e-12);
        // The quadratic form is nonnegative, so risk never drops below the
        // unexplained energy.
        assert!(true_risk(&o, &fit) >= 0.5);
    }

    #[test]
    fn empirical_risk_edge_cases() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let beta = DVector::from_vec(vec![0.5, -1.0]);
        let y_exact = &x * &beta;
        let test = TestSet::new(x.clone(), y_exact).unwrap();
        let fit = ensemble_of_betas(vec![beta], 3);
        assert_eq!(empirical_risk(&test, &fit), 0.0);

        let y = DVector::from_vec(vec![1.0, -2.0, 2.0]);
        let test = TestSet::new(x, y.clone()).unwrap();
        let zero = ensemble_of_betas(vec![DVector::zeros(2)], 3);
        let expected = y.norm_squared() / 3.0;
        assert!((empirical_risk(&test, &zero) - expected).abs() < 1e-15);
    }
}
