//! Synthetic designs for the simulation harness.
//!
//! Two families are provided: a Gaussian linear model with diagonal feature
//! covariance and a rescaled sparse signal, and a nonlinear model over AR(1)
//! correlated features where the response adds the mean-zero term
//! `||x||^2 / p - 1` on top of the linear signal.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, TestSet};
use crate::oracle::LinearModelOracle;
use crate::rng::{stream_rng, TAG_SIGNAL, TAG_TEST, TAG_TRAIN};

/// Eigenvalues of the (diagonal) feature covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Spectrum {
    /// Diagonal entries evenly spaced over `[lo, hi]`.
    EvenlySpaced { lo: f64, hi: f64 },
    /// Identity covariance.
    Isotropic,
    /// Explicit eigenvalues, one per coordinate.
    Custom { eigenvalues: Vec<f64> },
}

impl Spectrum {
    pub fn eigenvalues(&self, p: usize) -> Result<Vec<f64>, DatagenError> {
        let eigs = match self {
            Spectrum::EvenlySpaced { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && hi >= lo) {
                    return Err(DatagenError::InvalidSpec(format!(
                        "evenly spaced spectrum needs 0 < lo <= hi, got [{lo}, {hi}]"
                    )));
                }
                if p == 1 {
                    vec![*lo]
                } else {
                    let step = (hi - lo) / (p - 1) as f64;
                    (0..p).map(|j| lo + j as f64 * step).collect()
                }
            }
            Spectrum::Isotropic => vec![1.0; p],
            Spectrum::Custom { eigenvalues } => {
                if eigenvalues.len() != p {
                    return Err(DatagenError::InvalidSpec(format!(
                        "custom spectrum has {} eigenvalues for p = {p}",
                        eigenvalues.len()
                    )));
                }
                if eigenvalues.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                    return Err(DatagenError::InvalidSpec(
                        "custom spectrum eigenvalues must be positive".into(),
                    ));
                }
                eigenvalues.clone()
            }
        };
        Ok(eigs)
    }
}

/// Gaussian linear design: rows `x ~ N(0, diag(spectrum))`, signal with
/// `sparsity_tail` trailing zeros rescaled to the requested signal-to-noise
/// ratio, response `y = x' beta0 + N(0, sigma2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianLinearSpec {
    pub n: usize,
    pub p: usize,
    #[serde(default = "default_snr")]
    pub snr: f64,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    #[serde(default = "default_spectrum")]
    pub spectrum: Spectrum,
    #[serde(default = "default_sparsity_tail")]
    pub sparsity_tail: usize,
}

fn default_snr() -> f64 {
    1.0
}

fn default_sigma2() -> f64 {
    1.0
}

fn default_spectrum() -> Spectrum {
    Spectrum::EvenlySpaced { lo: 0.1, hi: 10.0 }
}

fn default_sparsity_tail() -> usize {
    100
}

impl GaussianLinearSpec {
    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.n == 0 || self.p == 0 {
            return Err(DatagenError::InvalidSpec("n and p must be positive".into()));
        }
        if self.sparsity_tail >= self.p {
            return Err(DatagenError::InvalidSpec(format!(
                "sparsity_tail = {} must be smaller than p = {}",
                self.sparsity_tail, self.p
            )));
        }
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(DatagenError::InvalidSpec(format!(
                "snr must be positive, got {}",
                self.snr
            )));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(DatagenError::InvalidSpec(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        self.spectrum.eigenvalues(self.p).map(|_| ())
    }
}

/// Marginal law of the i.i.d. factors behind the correlated features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeatureLaw {
    Gaussian,
    /// Student t(dof) scaled to unit variance; needs `dof > 4` so fourth
    /// moments stay bounded.
    ScaledHeavyTail {
        #[serde(default = "default_heavy_tail_dof")]
        dof: f64,
    },
}

fn default_heavy_tail_dof() -> f64 {
    6.0
}

/// Nonlinear design over AR(1) features:
/// `y = x' beta0 + (||x||^2 / p - 1) + N(0, noise_sigma2)` with
/// `x ~ Sigma_ar1(rho)^{1/2} z` and `beta0` the unit-norm average of the
/// top five eigenvectors of the AR(1) covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearAr1Spec {
    pub n: usize,
    pub p: usize,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_feature_law")]
    pub feature_law: FeatureLaw,
    #[serde(default = "default_sigma2")]
    pub noise_sigma2: f64,
}

fn default_rho() -> f64 {
    0.25
}

fn default_feature_law() -> FeatureLaw {
    FeatureLaw::Gaussian
}

impl NonlinearAr1Spec {
    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.n == 0 || self.p == 0 {
            return Err(DatagenError::InvalidSpec("n and p must be positive".into()));
        }
        if !(self.rho.is_finite() && self.rho.abs() < 1.0) {
            return Err(DatagenError::InvalidSpec(format!(
                "rho must satisfy |rho| < 1, got {}",
                self.rho
            )));
        }
        if !(self.noise_sigma2.is_finite() && self.noise_sigma2 > 0.0) {
            return Err(DatagenError::InvalidSpec(format!(
                "noise_sigma2 must be positive, got {}",
                self.noise_sigma2
            )));
        }
        if let FeatureLaw::ScaledHeavyTail { dof } = self.feature_law {
            if !(dof.is_finite() && dof > 4.0) {
                return Err(DatagenError::InvalidSpec(format!(
                    "heavy tail dof must exceed 4, got {dof}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("invalid design spec: {0}")]
    InvalidSpec(String),
}

/// Exact AR(1) covariance with entries `rho^{|i - j|}`.
pub fn ar1_covariance(p: usize, rho: f64) -> Result<DMatrix<f64>, DatagenError> {
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return Err(DatagenError::InvalidSpec(format!(
            "rho must satisfy |rho| < 1, got {rho}"
        )));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| {
        rho.powi((i as i32 - j as i32).abs())
    }))
}

/// Unit-norm average of the top five eigenvectors of the AR(1) covariance.
///
/// Each eigenvector is sign-normalized so its first nonzero component is
/// positive; eigenvalue ties (for example `rho = 0`) are broken by
/// coordinate order.
pub fn ar1_signal(p: usize, rho: f64) -> Result<DVector<f64>, DatagenError> {
    let sigma = ar1_covariance(p, rho)?;
    let eig = sigma.symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("AR(1) eigenvalues are finite")
            .then(a.cmp(&b))
    });
    let top = order.into_iter().take(5.min(p));
    let mut sum = DVector::zeros(p);
    for idx in top {
        let mut v = eig.eigenvectors.column(idx).clone_owned();
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        sum += v;
    }
    let norm = sum.norm();
    if norm == 0.0 {
        return Err(DatagenError::InvalidSpec(
            "degenerate eigenvector average".into(),
        ));
    }
    Ok(sum / norm)
}

fn sample_unit_factors<R: Rng>(rng: &mut R, count: usize, law: FeatureLaw) -> Vec<f64> {
    match law {
        FeatureLaw::Gaussian => (0..count).map(|_| rng.sample(StandardNormal)).collect(),
        FeatureLaw::ScaledHeavyTail { dof } => {
            let t = StudentT::new(dof).expect("dof validated");
            let scale = (dof / (dof - 2.0)).sqrt();
            (0..count).map(|_| t.sample(rng) / scale).collect()
        }
    }
}

fn gaussian_rows<R: Rng>(rng: &mut R, n: usize, scales: &[f64]) -> DMatrix<f64> {
    let p = scales.len();
    let mut data = vec![0.0; n * p];
    for row in data.chunks_mut(p) {
        for (j, value) in row.iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            *value = scales[j] * z;
        }
    }
    DMatrix::from_row_slice(n, p, &data)
}

/// Rows with covariance `rho^{|i-j|}` via the autoregressive recursion
/// `x_0 = z_0`, `x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j`, which works for
/// any unit-variance factor law.
fn ar1_rows<R: Rng>(rng: &mut R, n: usize, p: usize, rho: f64, law: FeatureLaw) -> DMatrix<f64> {
    let innovation = (1.0 - rho * rho).sqrt();
    let mut data = vec![0.0; n * p];
    for row in data.chunks_mut(p) {
        let z = sample_unit_factors(rng, p, law);
        row[0] = z[0];
        for j in 1..p {
            row[j] = rho * row[j - 1] + innovation * z[j];
        }
    }
    DMatrix::from_row_slice(n, p, &data)
}

/// Generates the Gaussian linear design plus its exact risk oracle and a
/// held-out test set of `n_test` rows. Deterministic given `seed`.
pub fn gen_gaussian_linear(
    spec: &GaussianLinearSpec,
    n_test: usize,
    seed: u64,
) -> Result<(Dataset, LinearModelOracle, TestSet), DatagenError> {
    spec.validate()?;
    let eigs = spec.spectrum.eigenvalues(spec.p)?;
    let scales: Vec<f64> = eigs.iter().map(|e| e.sqrt()).collect();

    // Raw signal: leading p - sparsity_tail coordinates standard normal,
    // then rescaled so beta0' Sigma beta0 = snr * sigma2.
    let mut signal_rng = stream_rng(seed, &[TAG_SIGNAL]);
    let active = spec.p - spec.sparsity_tail;
    let mut beta0 = DVector::zeros(spec.p);
    for j in 0..active {
        beta0[j] = signal_rng.sample::<f64, _>(StandardNormal);
    }
    let energy: f64 = beta0.iter().zip(eigs.iter()).map(|(b, e)| b * b * e).sum();
    if energy == 0.0 {
        return Err(DatagenError::InvalidSpec(
            "signal draw has zero energy; use a different seed".into(),
        ));
    }
    beta0 *= (spec.snr * spec.sigma2 / energy).sqrt();

    let noise_sd = spec.sigma2.sqrt();
    let make_split = |tag: u64, rows: usize| {
        let mut rng = stream_rng(seed, &[tag]);
        let x = gaussian_rows(&mut rng, rows, &scales);
        let mut y = &x * &beta0;
        for i in 0..rows {
            y[i] += noise_sd * rng.sample::<f64, _>(StandardNormal);
        }
        (x, y)
    };
    let (x, y) = make_split(TAG_TRAIN, spec.n);
    let (xt, yt) = make_split(TAG_TEST, n_test);

    let sigma = DMatrix::from_diagonal(&DVector::from_vec(eigs));
    let oracle = LinearModelOracle::new(sigma, beta0, spec.sigma2)
        .map_err(|e| DatagenError::InvalidSpec(e.to_string()))?;
    Ok((Dataset { x, y }, oracle, TestSet { x: xt, y: yt }))
}

/// Generates the nonlinear AR(1) design and a held-out test set.
/// Deterministic given `seed`.
pub fn gen_nonlinear_ar1(
    spec: &NonlinearAr1Spec,
    n_test: usize,
    seed: u64,
) -> Result<(Dataset, TestSet), DatagenError> {
    spec.validate()?;
    let beta0 = ar1_signal(spec.p, spec.rho)?;
    let noise_sd = spec.noise_sigma2.sqrt();
    let pf = spec.p as f64;
    let make_split = |tag: u64, rows: usize| {
        let mut rng = stream_rng(seed, &[tag]);
        let x = ar1_rows(&mut rng, rows, spec.p, spec.rho, spec.feature_law);
        let mut y = &x * &beta0;
        for i in 0..rows {
            let norm_sq = x.row(i).norm_squared();
            y[i] += norm_sq / pf - 1.0 + noise_sd * rng.sample::<f64, _>(StandardNormal);
        }
        (x, y)
    };
    let (x, y) = make_split(TAG_TRAIN, spec.n);
    let (xt, yt) = make_split(TAG_TEST, n_test);
    Ok((Dataset { x, y }, TestSet { x: xt, y: yt }))
}

/// Best-linear-projection oracle for the nonlinear AR(1) design. The
/// averaged-eigenvector signal is uncorrelated with the quadratic term, so
/// the projection coefficient is the signal itself and the unexplained
/// energy is `Var(||x||^2/p - 1) + noise_sigma2 = 2 tr(Sigma^2)/p^2 +
/// noise_sigma2` under Gaussian features.
pub fn ar1_linearization_oracle(
    spec: &NonlinearAr1Spec,
) -> Result<LinearModelOracle, DatagenError> {
    spec.validate()?;
    let sigma = ar1_covariance(spec.p, spec.rho)?;
    let beta0 = ar1_signal(spec.p, spec.rho)?;
    let pf = spec.p as f64;
    let trace_sq = sigma.iter().map(|v| v * v).sum::<f64>();
    let residual_energy = 2.0 * trace_sq / (pf * pf) + spec.noise_sigma2;
    LinearModelOracle::new(sigma, beta0, residual_energy)
        .map_err(|e| DatagenError::InvalidSpec(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_scaling_is_exact() {
        let spec = GaussianLinearSpec {
            n: 50,
            p: 30,
            snr: 1.0,
            sigma2: 2.0,
            spectrum: Spectrum::EvenlySpaced { lo: 0.1, hi: 10.0 },
            sparsity_tail: 10,
        };
        let (_, oracle, _) = gen_gaussian_linear(&spec, 10, 3).unwrap();
        let energy = oracle.beta0.dot(&(&oracle.sigma * &oracle.beta0));
        assert!((energy - spec.snr * spec.sigma2).abs() < 1e-10);
        // Trailing coordinates stay zero.
        for j in 20..30 {
            assert_eq!(oracle.beta0[j], 0.0);
        }
    }

    #[test]
    fn evenly_spaced_spectrum_entries() {
        let eigs = Spectrum::EvenlySpaced { lo: 0.1, hi: 10.0 }
            .eigenvalues(500)
            .unwrap();
        for (j, e) in eigs.iter().enumerate() {
            let expected = 0.1 + j as f64 * (9.9 / 499.0);
            assert!((e - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GaussianLinearSpec {
            n: 20,
            p: 8,
            snr: 1.0,
            sigma2: 1.0,
            spectrum: Spectrum::Isotropic,
            sparsity_tail: 2,
        };
        let a = gen_gaussian_linear(&spec, 5, 17).unwrap();
        let b = gen_gaussian_linear(&spec, 5, 17).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.2, b.2);
        let c = gen_gaussian_linear(&spec, 5, 18).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn ar1_covariance_small_cases() {
        let id = ar1_covariance(3, 0.0).unwrap();
        assert_eq!(id, DMatrix::identity(3, 3));
        let m = ar1_covariance(2, 0.25).unwrap();
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m[(0, 1)], 0.25);
        assert_eq!(m[(1, 0)], 0.25);
        assert!(ar1_covariance(3, 1.0).is_err());
    }

    #[test]
    fn ar1_covariance_is_positive_definite() {
        let m = ar1_covariance(50, 0.9).unwrap();
        let eig = m.symmetric_eigen();
        let min = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.0, "minimum eigenvalue {min} not positive");
    }

    #[test]
    fn ar1_signal_identity_ties_break_by_coordinate() {
        // rho = 0 makes every eigenvalue 1; the first five coordinate
        // directions are selected, so the signal is flat on them.
        let beta = ar1_signal(8, 0.0).unwrap();
        let expected = 1.0 / 5.0f64.sqrt();
        for j in 0..5 {
            assert!((beta[j].abs() - expected).abs() < 1e-12);
        }
        for j in 5..8 {
            assert!(beta[j].abs() < 1e-12);
        }
        assert!((beta.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ar1_rows_have_unit_diagonal_energy() {
        let spec = NonlinearAr1Spec {
            n: 4000,
            p: 20,
            rho: 0.25,
            feature_law: FeatureLaw::Gaussian,
            noise_sigma2: 1.0,
        };
        let (ds, _) = gen_nonlinear_ar1(&spec, 1, 5).unwrap();
        // E||x||^2 / p = 1, so the quadratic term is mean zero.
        let mean_energy: f64 =
            (0..ds.n()).map(|i| ds.x.row(i).norm_squared()).sum::<f64>() / (ds.n() * 20) as f64;
        assert!(
            (mean_energy - 1.0).abs() < 0.05,
            "mean feature energy {mean_energy} should be near 1"
        );
    }

    #[test]
    fn heavy_tail_law_is_unit_variance() {
        let spec = NonlinearAr1Spec {
            n: 20000,
            p: 4,
            rho: 0.0,
            feature_law: FeatureLaw::ScaledHeavyTail { dof: 6.0 },
            noise_sigma2: 1.0,
        };
        let (ds, _) = gen_nonlinear_ar1(&spec, 1, 9).unwrap();
        let var: f64 = ds.x.column(0).norm_squared() / ds.n() as f64;
        assert!((var - 1.0).abs() < 0.06, "factor variance {var}");
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = GaussianLinearSpec {
            n: 10,
            p: 5,
            snr: 1.0,
            sigma2: 1.0,
            spectrum: Spectrum::Isotropic,
            sparsity_tail: 5,
        };
        assert!(spec.validate().is_err());
        spec.sparsity_tail = 0;
        spec.snr = -1.0;
        assert!(spec.validate().is_err());

        let bad_rho = NonlinearAr1Spec {
            n: 10,
            p: 5,
            rho: 1.0,
            feature_law: FeatureLaw::Gaussian,
            noise_sigma2: 1.0,
        };
        assert!(bad_rho.validate().is_err());
    }
}
