//! Random-matrix deterministic equivalents for ridge ensembles.
//!
//! In the proportional regime `p/n -> phi`, `p/k -> psi`, every risk
//! quantity of a ridge ensemble concentrates around a nonrandom limit
//! parameterized by the solution `v` of the scalar fixed point
//!
//! `1/v = lambda + theta * integral r / (1 + v r) dH(r)`
//!
//! over the spectral distribution `H` of the feature covariance. This module
//! solves that fixed point ([`solve_v`]) and evaluates the limits of the
//! risk components, of both intermediate-estimator denominators, and of the
//! GCV bias ([`deterministic_equivalents`], [`predicted_gcv_gap`]). These
//! serve as independent oracles when testing the data-driven estimators.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::data::F64Full;

/// Tolerance on the fixed-point residual `|1/v - lambda - theta J1(v)|`.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// A discrete spectral distribution: positive eigenvalue atoms with weights
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    atoms: Vec<(f64, f64)>,
}

impl SpectralDistribution {
    /// Builds from `(eigenvalue, weight)` atoms; weights are renormalized to
    /// sum to exactly one.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self, AsymptoticsError> {
        if atoms.is_empty() {
            return Err(AsymptoticsError::InvalidSpectrum(
                "spectrum needs at least one atom".into(),
            ));
        }
        for &(r, w) in &atoms {
            if !(r.is_finite() && r > 0.0) {
                return Err(AsymptoticsError::InvalidSpectrum(format!(
                    "eigenvalue atoms must be positive, got {r}"
                )));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(AsymptoticsError::InvalidSpectrum(format!(
                    "weights must be nonnegative, got {w}"
                )));
            }
        }
        let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if total <= 0.0 {
            return Err(AsymptoticsError::InvalidSpectrum(
                "weights must have positive total".into(),
            ));
        }
        Ok(Self {
            atoms: atoms.into_iter().map(|(r, w)| (r, w / total)).collect(),
        })
    }

    /// Equal-weight atoms at the given eigenvalues.
    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Result<Self, AsymptoticsError> {
        let w = 1.0 / eigenvalues.len().max(1) as f64;
        Self::from_atoms(eigenvalues.iter().map(|&r| (r, w)).collect())
    }

    /// A single atom at `r` with weight one.
    pub fn point_mass(r: f64) -> Result<Self, AsymptoticsError> {
        Self::from_atoms(vec![(r, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.atoms.iter().map(|&(r, w)| w * f(r)).sum()
    }
}

/// Solution of the ridge fixed-point equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolution {
    /// The nonnegative solution; `f64::INFINITY` when no finite solution
    /// exists (`lambda = 0` with `theta <= 1`).
    pub v: f64,
    pub lambda: f64,
    pub theta: f64,
    /// `|1/v - lambda - theta J1(v)|`; zero by convention for infinite `v`.
    pub residual: f64,
}

#[derive(Debug, Clone, Error)]
pub enum AsymptoticsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("regime divergence: {0}")]
    RegimeDivergence(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("spectrum io: {0}")]
    Io(String),
}

/// Solves `1/v = lambda + theta * integral r/(1 + v r) dH` for the unique
/// nonnegative root by bisection on `h(v) = 1 - lambda v - theta *
/// integral v r / (1 + v r) dH`, which is strictly decreasing with
/// `h(0) = 1`. For `lambda = 0` the root exists only when `theta > 1`;
/// otherwise `v = +inf` is returned.
pub fn solve_v(
    lambda: f64,
    theta: f64,
    spectrum: &SpectralDistribution,
) -> Result<FixedPointSolution, AsymptoticsError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(AsymptoticsError::InvalidInput(format!(
            "lambda must be a nonnegative real, got {lambda}"
        )));
    }
    if !(theta.is_finite() && theta > 0.0) {
        return Err(AsymptoticsError::InvalidInput(format!(
            "theta must be a positive real, got {theta}"
        )));
    }
    if lambda == 0.0 && theta <= 1.0 {
        return Ok(FixedPointSolution {
            v: f64::INFINITY,
            lambda,
            theta,
            residual: 0.0,
        });
    }
    let h = |v: f64| 1.0 - lambda * v - theta * spectrum.integrate(|r| v * r / (1.0 + v * r));

    let mut hi = 1.0f64;
    let mut expansions = 0;
    while h(hi) > 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 1000 {
            return Err(AsymptoticsError::Numerical(
                "no sign change found for the fixed-point bracket".into(),
            ));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = 0.5 * (lo + hi);
    let residual = (1.0 / v - lambda - theta * spectrum.integrate(|r| r / (1.0 + v * r))).abs();
    Ok(FixedPointSolution {
        v,
        lambda,
        theta,
        residual,
    })
}

/// How the signal interacts with the covariance when evaluating the bias
/// energy `beta0' (v Sigma + I)^{-1} Sigma (v Sigma + I)^{-1} beta0`.
pub enum SignalGeometry<'a> {
    /// Exact evaluation from the covariance matrix and signal vector.
    Exact {
        sigma: &'a DMatrix<f64>,
        beta0: &'a DVector<f64>,
    },
    /// Signal energy spread evenly across eigendirections, a documented
    /// approximation for when only the spectrum is available:
    /// `energy * integral r / (1 + v r)^2 dH`.
    Isotropic { energy: f64 },
}

/// Nonrandom limits of the ridge ensemble risk components and of the
/// intermediate-estimator denominators at aspect ratios `phi = p/n`,
/// `psi = p/k`.
///
/// `diag` quantities apply to a component paired with itself, `offdiag` to
/// two components on independently drawn subsamples. The numerator limits
/// factor as denominator times risk and are exposed as methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicEquivalents {
    pub lambda: f64,
    pub phi: f64,
    pub psi: f64,
    /// Fixed-point solution `v(-lambda; psi)`.
    pub v: f64,
    /// Variance inflation `tv` for a component against itself.
    pub variance_inflation_diag: f64,
    /// Variance inflation `tv` for two independent components.
    pub variance_inflation_offdiag: f64,
    /// Bias energy `tc`.
    pub bias_energy: f64,
    /// Energy of the response component a linear predictor cannot explain;
    /// equals the noise variance under a linear model.
    pub residual_energy: f64,
    /// Limit of the (m, m) risk component.
    pub risk_diag: f64,
    /// Limit of the (m, l) risk component for two independent subsamples.
    pub risk_offdiag: f64,
    /// Limit of the overlap-estimator denominator, `(lambda v)^2`.
    pub sub_denominator: f64,
    /// Limit of the full-estimator denominator on the diagonal.
    pub full_denominator_diag: f64,
    /// Limit of the full-estimator denominator off the diagonal; also the
    /// limit of `(1 - tdf/n)^2`.
    pub full_denominator_offdiag: f64,
}

impl DeterministicEquivalents {
    pub fn risk(&self, same_component: bool) -> f64 {
        if same_component {
            self.risk_diag
        } else {
            self.risk_offdiag
        }
    }

    /// Limit of the overlap-estimator numerator.
    pub fn sub_numerator(&self, same_component: bool) -> f64 {
        self.sub_denominator * self.risk(same_component)
    }

    /// Limit of the full-estimator numerator.
    pub fn full_numerator(&self, same_component: bool) -> f64 {
        let d = if same_component {
            self.full_denominator_diag
        } else {
            self.full_denominator_offdiag
        };
        d * self.risk(same_component)
    }

    /// Risk limit of the size-`m` ensemble: `m` diagonal components and
    /// `m(m-1)` off-diagonal ones, averaged.
    pub fn ensemble_risk(&self, m: usize) -> f64 {
        let mf = m as f64;
        self.risk_diag / mf + (mf - 1.0) / mf * self.risk_offdiag
    }
}

/// Evaluates all deterministic equivalents at `(lambda, phi, psi)`.
///
/// Requires `0 < phi <= psi` and a finite fixed point; `psi = 1` with
/// `lambda = 0` is rejected because both the risk and its estimators
/// diverge there.
pub fn deterministic_equivalents(
    lambda: f64,
    phi: f64,
    psi: f64,
    spectrum: &SpectralDistribution,
    signal: &SignalGeometry<'_>,
    residual_energy: f64,
) -> Result<DeterministicEquivalents, AsymptoticsError> {
    if !(phi.is_finite() && psi.is_finite() && phi > 0.0 && psi >= phi) {
        return Err(AsymptoticsError::InvalidInput(format!(
            "aspect ratios must satisfy 0 < phi <= psi < inf, got phi = {phi}, psi = {psi}"
        )));
    }
    if !(residual_energy.is_finite() && residual_energy >= 0.0) {
        return Err(AsymptoticsError::InvalidInput(format!(
            "residual energy must be nonnegative, got {residual_energy}"
        )));
    }
    if lambda == 0.0 && psi == 1.0 {
        return Err(AsymptoticsError::RegimeDivergence(
            "risk and risk estimates diverge at psi = 1 with lambda = 0".into(),
        ));
    }
    let solution = solve_v(lambda, psi, spectrum)?;
    let v = solution.v;
    if !v.is_finite() {
        return Err(AsymptoticsError::RegimeDivergence(format!(
            "fixed point has no finite solution at lambda = {lambda}, psi = {psi}"
        )));
    }

    let j2 = spectrum.integrate(|r| (r / (1.0 + v * r)).powi(2));
    let inv_v_sq = 1.0 / (v * v);
    let inflation = |aspect: f64| -> Result<f64, AsymptoticsError> {
        let denom = inv_v_sq - aspect * j2;
        if denom <= 0.0 {
            return Err(AsymptoticsError::RegimeDivergence(format!(
                "variance inflation denominator {denom} <= 0 at aspect {aspect}"
            )));
        }
        Ok(aspect * j2 / denom)
    };
    let variance_inflation_diag = inflation(psi)?;
    let variance_inflation_offdiag = inflation(phi)?;

    let bias_energy = match signal {
        SignalGeometry::Exact { sigma, beta0 } => {
            let p = sigma.nrows();
            if sigma.ncols() != p || beta0.len() != p {
                return Err(AsymptoticsError::InvalidInput(
                    "signal geometry dimensions do not match".into(),
                ));
            }
            let mut shifted = sigma.scale(v);
            for i in 0..p {
                shifted[(i, i)] += 1.0;
            }
            let chol = shifted.cholesky().ok_or_else(|| {
                AsymptoticsError::Numerical("factorization of v*Sigma + I failed".into())
            })?;
            let w = chol.solve(beta0);
            w.dot(&(*sigma * &w))
        }
        SignalGeometry::Isotropic { energy } => {
            if !(energy.is_finite() && *energy >= 0.0) {
                return Err(AsymptoticsError::InvalidInput(format!(
                    "signal energy must be nonnegative, got {energy}"
                )));
            }
            energy * spectrum.integrate(|r| r / (1.0 + v * r).powi(2))
        }
    };

    let lv = lambda * v;
    let out_fraction = (psi - phi) / psi;
    let in_fraction = phi / psi;
    let signal_scale = residual_energy + bias_energy;
    Ok(DeterministicEquivalents {
        lambda,
        phi,
        psi,
        v,
        variance_inflation_diag,
        variance_inflation_offdiag,
        bias_energy,
        residual_energy,
        risk_diag: signal_scale * (1.0 + variance_inflation_diag),
        risk_offdiag: signal_scale * (1.0 + variance_inflation_offdiag),
        sub_denominator: lv * lv,
        full_denominator_diag: out_fraction + in_fraction * lv * lv,
        full_denominator_offdiag: (out_fraction + in_fraction * lv).powi(2),
    })
}

/// Predicted limit of `risk - GCV` for a size-`m` ensemble:
/// `(1/m) (1 - D_diag / D_offdiag) (1 + tv_diag) (residual + bias)`.
/// Nonpositive, reflecting that GCV over-estimates the risk; vanishes as
/// `m` grows or when every subsample is the full sample.
pub fn predicted_gcv_gap(equivalents: &DeterministicEquivalents, m: usize) -> f64 {
    let ratio = equivalents.full_denominator_diag / equivalents.full_denominator_offdiag;
    (1.0 - ratio)
        * (1.0 + equivalents.variance_inflation_diag)
        * (equivalents.residual_energy + equivalents.bias_energy)
        / m as f64
}

/// Reads a spectrum from CSV rows `eigenvalue,weight`; a header row with
/// those names is accepted and skipped.
pub fn read_spectrum_csv<R: Read>(reader: R) -> Result<SpectralDistribution, AsymptoticsError> {
    let reader = BufReader::new(reader);
    let mut atoms = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| AsymptoticsError::Io(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if idx == 0 && trimmed.starts_with("eigenvalue") {
            continue;
        }
        let mut parts = trimmed.split(',');
        let (r, w) = match (parts.next(), parts.next(), parts.next()) {
            (Some(r), Some(w), None) => (r, w),
            _ => {
                return Err(AsymptoticsError::Io(format!(
                    "line {}: expected `eigenvalue,weight`",
                    idx + 1
                )))
            }
        };
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| AsymptoticsError::Io(format!("line {}: {e}", idx + 1)))
        };
        atoms.push((parse(r)?, parse(w)?));
    }
    SpectralDistribution::from_atoms(atoms)
}

pub fn write_spectrum_csv<W: Write>(
    spectrum: &SpectralDistribution,
    writer: W,
) -> Result<(), AsymptoticsError> {
    let mut w = BufWriter::new(writer);
    let emit = |w: &mut BufWriter<W>, s: String| {
        w.write_all(s.as_bytes())
            .map_err(|e| AsymptoticsError::Io(e.to_string()))
    };
    emit(&mut w, "eigenvalue,weight\n".to_string())?;
    for &(r, weight) in spectrum.atoms() {
        emit(&mut w, format!("{},{}\n", F64Full(r), F64Full(weight)))?;
    }
    w.flush().map_err(|e| AsymptoticsError::Io(e.to_string()))
}
