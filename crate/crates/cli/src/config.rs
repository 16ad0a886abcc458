//! Sweep configuration: JSON in, validated experiment plan out.
//!
//! Unknown keys are rejected everywhere so typos in sweep definitions fail
//! loudly instead of silently running the wrong experiment.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use cgcv_core::datagen::{GaussianLinearSpec, NonlinearAr1Spec};
use cgcv_core::solvers::PenaltyConfig;

use crate::sweep::EstimatorKind;

/// Which synthetic design generates each repetition's dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignConfig {
    GaussianLinear(GaussianLinearSpec),
    NonlinearAr1(NonlinearAr1Spec),
}

impl DesignConfig {
    pub fn n(&self) -> usize {
        match self {
            DesignConfig::GaussianLinear(s) => s.n,
            DesignConfig::NonlinearAr1(s) => s.n,
        }
    }

    pub fn p(&self) -> usize {
        match self {
            DesignConfig::GaussianLinear(s) => s.p,
            DesignConfig::NonlinearAr1(s) => s.p,
        }
    }
}

/// Penalty family plus the grid of regularization levels to sweep. For the
/// elastic net the grid ranges over `lambda1` with `lambda2` held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltySweep {
    Ridge {
        lambda_grid: Vec<f64>,
    },
    Ridgeless,
    Lasso {
        lambda_grid: Vec<f64>,
    },
    ElasticNet {
        lambda1_grid: Vec<f64>,
        lambda2: f64,
    },
}

impl PenaltySweep {
    /// The `(grid label, concrete penalty)` pairs, in configuration order.
    pub fn cells(&self) -> Vec<(f64, PenaltyConfig)> {
        match self {
            PenaltySweep::Ridge { lambda_grid } => lambda_grid
                .iter()
                .map(|&lambda| (lambda, PenaltyConfig::Ridge { lambda }))
                .collect(),
            PenaltySweep::Ridgeless => vec![(0.0, PenaltyConfig::Ridgeless)],
            PenaltySweep::Lasso { lambda_grid } => lambda_grid
                .iter()
                .map(|&lambda| (lambda, PenaltyConfig::Lasso { lambda }))
                .collect(),
            PenaltySweep::ElasticNet {
                lambda1_grid,
                lambda2,
            } => lambda1_grid
                .iter()
                .map(|&lambda1| {
                    (
                        lambda1,
                        PenaltyConfig::ElasticNet {
                            lambda1,
                            lambda2: *lambda2,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn is_ridge_family(&self) -> bool {
        matches!(self, PenaltySweep::Ridge { .. } | PenaltySweep::Ridgeless)
    }

    /// Coordinate-descent penalties benefit from warm starts along the grid.
    pub fn uses_warm_starts(&self) -> bool {
        !self.is_ridge_family()
    }

    fn grid(&self) -> Vec<f64> {
        self.cells().into_iter().map(|(l, _)| l).collect()
    }
}

/// A full sweep: design, penalty grid, `(k, M)` grids, repetitions, seed,
/// and which estimators to evaluate per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub design: DesignConfig,
    pub penalty: PenaltySweep,
    pub k_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
    /// Held-out rows for empirical risk; defaults to `10 * n`.
    #[serde(default)]
    pub n_test: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn resolved_n_test(&self) -> usize {
        self.n_test.unwrap_or(10 * self.design.n())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.design {
            DesignConfig::GaussianLinear(s) => s.validate(),
            DesignConfig::NonlinearAr1(s) => s.validate(),
        }
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let grid = self.penalty.grid();
        if grid.is_empty() {
            return Err(ConfigError::Invalid("penalty grid is empty".into()));
        }
        if grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(ConfigError::Invalid(
                "penalty grid values must be nonnegative finite reals".into(),
            ));
        }
        for (_, penalty) in self.penalty.cells() {
            penalty
                .validate()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }

        if self.k_grid.is_empty() || self.m_grid.is_empty() {
            return Err(ConfigError::Invalid(
                "k_grid and m_grid must be nonempty".into(),
            ));
        }
        let n = self.design.n();
        if self.k_grid.iter().any(|&k| k == 0 || k > n) {
            return Err(ConfigError::Invalid(format!(
                "k_grid entries must satisfy 1 <= k <= n = {n}"
            )));
        }
        if self.m_grid.contains(&0) {
            return Err(ConfigError::Invalid(
                "m_grid entries must be positive".into(),
            ));
        }
        if self.reps == 0 {
            return Err(ConfigError::Invalid("reps must be positive".into()));
        }
        if self.estimators.is_empty() {
            return Err(ConfigError::Invalid("estimators must be nonempty".into()));
        }
        if self.estimators.contains(&EstimatorKind::Asymptotic) && !self.penalty.is_ridge_family() {
            return Err(ConfigError::Invalid(
                "the asymptotic oracle is available for ridge penalties only".into(),
            ));
        }
        if self.n_test == Some(0)
            && self.estimators.contains(&EstimatorKind::Risk)
            && matches!(self.design, DesignConfig::NonlinearAr1(_))
        {
            return Err(ConfigError::Invalid(
                "the nonlinear design estimates risk on a test set; n_test must be positive".into(),
            ));
        }
        Ok(())
    }
}
