//! Monte Carlo sweep harness and CLI for subsample-ensemble risk estimation.
//!
//! A JSON [`config::ExperimentConfig`] describes a synthetic design, a
//! penalty grid, subsample and ensemble-size grids, and the set of
//! estimators to evaluate. [`sweep::run_sweep`] runs the repetitions
//! (optionally in parallel, with per-repetition derived seeds so results are
//! identical at any thread count) and produces one [`sweep::ResultRow`] per
//! `(rep, lambda, k, M, estimator)` cell; [`output::write_csv`] streams the
//! rows to disk.

pub mod cli;
pub mod config;
pub mod output;
pub mod sweep;

pub use config::ExperimentConfig;
pub use sweep::{run_sweep, EstimatorKind, ResultRow, Status};
