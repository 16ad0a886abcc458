//! Subsample ensembles of penalized least squares estimators together with
//! consistent estimates of their out-of-sample prediction risk.
//!
//! The pipeline is: draw random subsamples ([`ensemble::draw_subsamples`]),
//! fit one penalized estimator per subsample ([`ensemble::fit_ensemble`] on
//! top of [`solvers`]), then score the averaged predictor with the risk
//! estimators in [`estimators`]: the ensemble GCV, two intermediate
//! estimators built from the pairwise risk decomposition, and the corrected
//! GCV (CGCV) which removes the finite-ensemble bias of GCV at O(M) cost.
//!
//! [`oracle`] computes exact conditional risk when the data-generating model
//! is known, [`datagen`] produces the synthetic designs used by the
//! simulation harness, and [`asymptotics`] evaluates random-matrix
//! deterministic equivalents for ridge ensembles, which serve as independent
//! oracles for consistency checks.

pub mod asymptotics;
pub mod data;
pub mod datagen;
pub mod ensemble;
pub mod estimators;
pub mod oracle;
pub mod rng;
pub mod solvers;

pub use data::{Dataset, TestSet};
pub use ensemble::{draw_subsamples, fit_ensemble, intersection_size, EnsembleFit, IndexSet};
pub use estimators::{cgcv, gcv_full_data, gcv_union, intermediate_estimator, RiskReport, Variant};
pub use oracle::LinearModelOracle;
pub use solvers::{fit_elastic_net, fit_lasso, fit_penalized, fit_ridge, FitResult, PenaltyConfig};
