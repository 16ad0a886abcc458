//! The Monte Carlo sweep: one dataset per repetition, component fits shared
//! across ensemble sizes by nesting, every requested estimator evaluated on
//! every `(lambda, k, M)` cell.
//!
//! Repetitions run in parallel; each derives its own random streams from
//! `(seed, rep)`, and rows are merged in repetition order, so output is
//! byte-identical at any thread count.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use cgcv_core::asymptotics::{
    deterministic_equivalents, AsymptoticsError, SignalGeometry, SpectralDistribution,
};
use cgcv_core::data::{Dataset, TestSet};
use cgcv_core::datagen::{
    ar1_linearization_oracle, gen_gaussian_linear, gen_nonlinear_ar1, DatagenError,
};
use cgcv_core::ensemble::{
    draw_subsamples, fit_component, EnsembleComponent, EnsembleError, EnsembleFit,
};
use cgcv_core::estimators::{
    cgcv, gcv_full_data, gcv_union, intermediate_estimator, EstimatorError, Variant,
};
use cgcv_core::oracle::{empirical_risk, true_risk, LinearModelOracle};
use cgcv_core::rng::{derive_seed, TAG_REP};
use cgcv_core::solvers::{PenaltyConfig, SolverError};

use crate::config::{DesignConfig, ExperimentConfig};

/// The estimators a sweep can evaluate per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Ground truth: exact conditional risk under the Gaussian linear
    /// oracle, empirical test-set risk under the nonlinear design.
    Risk,
    /// Ensemble GCV on all n rows.
    Gcv,
    /// Ensemble GCV on the realized subsample union.
    GcvUnion,
    /// Intermediate estimator from overlapping observations.
    Sub,
    /// Intermediate estimator from all observations.
    Full,
    CgcvSub,
    CgcvFull,
    /// Deterministic-equivalent risk of the ensemble (ridge only).
    Asymptotic,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Risk => "risk",
            EstimatorKind::Gcv => "gcv",
            EstimatorKind::GcvUnion => "gcv_union",
            EstimatorKind::Sub => "sub",
            EstimatorKind::Full => "full",
            EstimatorKind::CgcvSub => "cgcv_sub",
            EstimatorKind::CgcvFull => "cgcv_full",
            EstimatorKind::Asymptotic => "asymptotic",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "risk" => EstimatorKind::Risk,
            "gcv" => EstimatorKind::Gcv,
            "gcv_union" => EstimatorKind::GcvUnion,
            "sub" => EstimatorKind::Sub,
            "full" => EstimatorKind::Full,
            "cgcv_sub" => EstimatorKind::CgcvSub,
            "cgcv_full" => EstimatorKind::CgcvFull,
            "asymptotic" => EstimatorKind::Asymptotic,
            _ => return None,
        })
    }
}

/// Cell outcome. `value` is finite exactly when the status is `Ok`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Degenerate,
    EmptyOverlap,
    NonConverged,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Degenerate => "degenerate",
            Status::EmptyOverlap => "empty_overlap",
            Status::NonConverged => "non_converged",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "ok" => Status::Ok,
            "degenerate" => Status::Degenerate,
            "empty_overlap" => Status::EmptyOverlap,
            "non_converged" => Status::NonConverged,
            _ => return None,
        })
    }
}

/// One evaluated cell of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub rep: usize,
    pub lambda: f64,
    pub k: usize,
    pub m: usize,
    pub estimator: EstimatorKind,
    pub value: f64,
    pub status: Status,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error("solver failure: {0}")]
    Solver(SolverError),
}

/// Fixed per-sweep inputs for the deterministic-equivalent oracle. The
/// covariance and spectrum are design constants; the signal vector may vary
/// per repetition (it is drawn with the Gaussian linear data).
struct AsymptoticContext {
    spectrum: SpectralDistribution,
    sigma: DMatrix<f64>,
    residual_energy: f64,
    /// Signal for designs where it is deterministic; per-rep otherwise.
    fixed_beta0: Option<DVector<f64>>,
}

/// Everything one repetition needs in hand to evaluate its cells.
struct RepData {
    dataset: Dataset,
    oracle: Option<LinearModelOracle>,
    test: Option<TestSet>,
}

fn stream_seed(seed: u64, tags: &[u64]) -> u64 {
    u64::from_le_bytes(derive_seed(seed, tags)[..8].try_into().expect("8 bytes"))
}

/// Runs the full sweep and returns rows ordered by
/// `(rep, k, lambda, M, estimator)` with grids in configuration order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>, SweepError> {
    let asymptotic_context = if config.estimators.contains(&EstimatorKind::Asymptotic) {
        Some(build_asymptotic_context(config)?)
    } else {
        None
    };
    let per_rep: Result<Vec<Vec<ResultRow>>, SweepError> = (0..config.reps)
        .into_par_iter()
        .map(|rep| run_rep(config, asymptotic_context.as_ref(), rep))
        .collect();
    Ok(per_rep?.into_iter().flatten().collect())
}

fn build_asymptotic_context(config: &ExperimentConfig) -> Result<AsymptoticContext, SweepError> {
    match &config.design {
        DesignConfig::GaussianLinear(spec) => {
            let eigenvalues = spec
                .spectrum
                .eigenvalues(spec.p)
                .map_err(SweepError::Datagen)?;
            let spectrum = SpectralDistribution::from_eigenvalues(&eigenvalues)?;
            let sigma = DMatrix::from_diagonal(&DVector::from_vec(eigenvalues));
            Ok(AsymptoticContext {
                spectrum,
                sigma,
                residual_energy: spec.sigma2,
                fixed_beta0: None,
            })
        }
        DesignConfig::NonlinearAr1(spec) => {
            let oracle = ar1_linearization_oracle(spec)?;
            let eigenvalues: Vec<f64> = oracle
                .sigma
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .collect();
            let spectrum = SpectralDistribution::from_eigenvalues(&eigenvalues)?;
            Ok(AsymptoticContext {
                spectrum,
                sigma: oracle.sigma,
                residual_energy: oracle.sigma2,
                fixed_beta0: Some(oracle.beta0),
            })
        }
    }
}

fn generate_rep_data(config: &ExperimentConfig, rep: usize) -> Result<RepData, SweepError> {
    let data_seed = stream_seed(config.seed, &[TAG_REP, rep as u64]);
    let wants_risk = config.estimators.contains(&EstimatorKind::Risk);
    match &config.design {
        DesignConfig::GaussianLinear(spec) => {
            // Exact risk comes from the oracle; no test rows needed.
            let (dataset, oracle, _) = gen_gaussian_linear(spec, 0, data_seed)?;
            Ok(RepData {
                dataset,
                oracle: Some(oracle),
                test: None,
            })
        }
        DesignConfig::NonlinearAr1(spec) => {
            let n_test = if wants_risk {
                config.resolved_n_test()
            } else {
                0
            };
            let (dataset, test) = gen_nonlinear_ar1(spec, n_test, data_seed)?;
            Ok(RepData {
                dataset,
                oracle: None,
                test: wants_risk.then_some(test),
            })
        }
    }
}

fn run_rep(
    config: &ExperimentConfig,
    asymptotic: Option<&AsymptoticContext>,
    rep: usize,
) -> Result<Vec<ResultRow>, SweepError> {
    let data = generate_rep_data(config, rep)?;
    let n = data.dataset.n();
    let m_max = *config.m_grid.iter().max().expect("m_grid validated");
    let cells = config.penalty.cells();
    let mut rows = Vec::new();

    for &k in &config.k_grid {
        let subset_seed = stream_seed(config.seed, &[TAG_REP, rep as u64, k as u64]);
        let subsets = draw_subsamples(n, k, m_max, subset_seed)?;
        let fits = fit_grid(config, &data.dataset, &cells, &subsets)?;

        for (cell_idx, (lambda, _)) in cells.iter().enumerate() {
            for &m in &config.m_grid {
                let components = &fits[cell_idx][..m];
                let ensemble = assemble(components, n)?;
                for &estimator in &config.estimators {
                    let (value, status) = match &ensemble {
                        Some(fit) => {
                            evaluate(estimator, fit, &data, asymptotic, config, *lambda, k, m)?
                        }
                        // A non-converged component poisons the whole cell.
                        None => (f64::NAN, Status::NonConverged),
                    };
                    rows.push(ResultRow {
                        rep,
                        lambda: *lambda,
                        k,
                        m,
                        estimator,
                        value,
                        status,
                    });
                }
            }
        }
    }
    Ok(rows)
}

type ComponentGrid = Vec<Vec<Result<EnsembleComponent, SolverError>>>;

/// Fits all `(penalty cell, component)` pairs for one `k`. The same drawn
/// subsets serve every cell, and coordinate-descent penalties are warm
/// started along the grid in decreasing order of regularization.
fn fit_grid(
    config: &ExperimentConfig,
    dataset: &Dataset,
    cells: &[(f64, PenaltyConfig)],
    subsets: &[cgcv_core::ensemble::IndexSet],
) -> Result<ComponentGrid, SweepError> {
    let mut order: Vec<usize> = (0..cells.len()).collect();
    if config.penalty.uses_warm_starts() {
        order.sort_by(|&a, &b| {
            cells[b]
                .0
                .partial_cmp(&cells[a].0)
                .expect("grid values are finite")
        });
    }
    let mut fits: ComponentGrid = (0..cells.len())
        .map(|_| Vec::with_capacity(subsets.len()))
        .collect();
    for (cell_idx, row) in fits.iter_mut().enumerate() {
        row.resize_with(subsets.len(), || {
            Err(SolverError::InvalidInput("not yet fitted".into()))
        });
        let _ = cell_idx;
    }
    for (m, subset) in subsets.iter().enumerate() {
        let mut warm: Option<DVector<f64>> = None;
        for &cell_idx in &order {
            let penalty = &cells[cell_idx].1;
            let result = fit_component(&dataset.x, &dataset.y, penalty, subset, warm.as_ref());
            match &result {
                Ok(component) => warm = Some(component.fit.beta.clone()),
                Err(SolverError::NonConvergence { beta, .. }) => warm = Some(beta.clone()),
                Err(other) => return Err(SweepError::Solver(other.clone())),
            }
            fits[cell_idx][m] = result;
        }
    }
    Ok(fits)
}

/// `Some(fit)` when every prefix component converged, `None` otherwise.
fn assemble(
    components: &[Result<EnsembleComponent, SolverError>],
    n: usize,
) -> Result<Option<EnsembleFit>, SweepError> {
    let mut ok = Vec::with_capacity(components.len());
    for c in components {
        match c {
            Ok(component) => ok.push(component.clone()),
            Err(SolverError::NonConvergence { .. }) => return Ok(None),
            Err(other) => return Err(SweepError::Solver(other.clone())),
        }
    }
    Ok(Some(EnsembleFit::from_components(ok, n)?))
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    estimator: EstimatorKind,
    fit: &EnsembleFit,
    data: &RepData,
    asymptotic: Option<&AsymptoticContext>,
    config: &ExperimentConfig,
    lambda: f64,
    k: usize,
    m: usize,
) -> Result<(f64, Status), SweepError> {
    // Rows carry a finite value exactly when the status is ok; an
    // adjustment that underflows to an infinite ratio counts as degenerate.
    let from_estimate = |r: Result<f64, EstimatorError>| match r {
        Ok(v) if v.is_finite() => (v, Status::Ok),
        Ok(_) => (f64::NAN, Status::Degenerate),
        Err(EstimatorError::DegenerateDenominator { .. }) => (f64::NAN, Status::Degenerate),
        Err(EstimatorError::EmptyOverlap { .. }) => (f64::NAN, Status::EmptyOverlap),
    };
    let row = match estimator {
        EstimatorKind::Risk => match (&data.oracle, &data.test) {
            (Some(oracle), _) => (true_risk(oracle, fit), Status::Ok),
            (None, Some(test)) => (empirical_risk(test, fit), Status::Ok),
            (None, None) => unreachable!("risk requested without oracle or test set"),
        },
        EstimatorKind::Gcv => from_estimate(gcv_full_data(fit)),
        EstimatorKind::GcvUnion => from_estimate(gcv_union(fit)),
        EstimatorKind::Sub => from_estimate(intermediate_estimator(fit, Variant::Sub)),
        EstimatorKind::Full => from_estimate(intermediate_estimator(fit, Variant::Full)),
        EstimatorKind::CgcvSub => from_estimate(cgcv(fit, Variant::Sub)),
        EstimatorKind::CgcvFull => from_estimate(cgcv(fit, Variant::Full)),
        EstimatorKind::Asymptotic => {
            let context = asymptotic.expect("asymptotic context built up front");
            let beta0 = context
                .fixed_beta0
                .as_ref()
                .or_else(|| data.oracle.as_ref().map(|o| &o.beta0))
                .expect("signal vector available");
            let phi = config.design.p() as f64 / config.design.n() as f64;
            let psi = config.design.p() as f64 / k as f64;
            match deterministic_equivalents(
                lambda,
                phi,
                psi,
                &context.spectrum,
                &SignalGeometry::Exact {
                    sigma: &context.sigma,
                    beta0,
                },
                context.residual_energy,
            ) {
                Ok(eq) if eq.ensemble_risk(m).is_finite() => (eq.ensemble_risk(m), Status::Ok),
                Ok(_) => (f64::NAN, Status::Degenerate),
                Err(AsymptoticsError::RegimeDivergence(_)) => (f64::NAN, Status::Degenerate),
                Err(other) => return Err(SweepError::Asymptotics(other)),
            }
        }
    };
    Ok(row)
}
