//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors (bad
//! flags, missing or invalid files), 2 for runtime failures (solver or
//! output errors).

use std::ffi::OsString;
use std::fs::File;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use cgcv_core::asymptotics::{read_spectrum_csv, solve_v, SpectralDistribution};
use cgcv_core::data::load_dataset_csv;
use cgcv_core::ensemble::{draw_subsamples, fit_ensemble};
use cgcv_core::estimators::RiskReport;
use cgcv_core::solvers::PenaltyConfig;

use crate::config::ExperimentConfig;
use crate::output::write_csv;
use crate::sweep::run_sweep;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Environment variable consulted when `--threads` is not given.
pub const THREADS_ENV: &str = "CGCV_THREADS";

#[derive(Parser)]
#[command(
    name = "cgcv",
    about = "Subsample-ensemble risk estimation: Monte Carlo sweeps, fixed-point oracle, single fits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured Monte Carlo sweep and write a CSV result table.
    Simulate {
        /// Path to the JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for repetitions; defaults to CGCV_THREADS or all
        /// cores. Results are identical at any thread count.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Solve the ridge fixed point and print v and its residual.
    Fixedpoint {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        theta: f64,
        /// Spectrum CSV (`eigenvalue,weight` rows); defaults to a point
        /// mass at one.
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Fit one subsample ensemble on a dataset CSV and print the risk
    /// report as JSON.
    Fit {
        /// Dataset CSV with header `x_0,...,x_{p-1},y`.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        penalty: PenaltyKind,
        /// Regularization level for ridge and lasso.
        #[arg(long)]
        lambda: Option<f64>,
        /// Elastic net l1 level.
        #[arg(long)]
        lambda1: Option<f64>,
        /// Elastic net l2 level.
        #[arg(long)]
        lambda2: Option<f64>,
        /// Subsample size.
        #[arg(long)]
        k: usize,
        /// Ensemble size.
        #[arg(long = "M", short = 'M')]
        m: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PenaltyKind {
    Ridge,
    Ridgeless,
    Lasso,
    ElasticNet,
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

/// Parses and executes; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Usage, help, and version all land here; help/version are not
            // errors.
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            config,
            out,
            seed,
            threads,
        } => simulate(config, out, seed, threads),
        Command::Fixedpoint {
            lambda,
            theta,
            spectrum,
        } => fixedpoint(lambda, theta, spectrum),
        Command::Fit {
            data,
            penalty,
            lambda,
            lambda1,
            lambda2,
            k,
            m,
            seed,
        } => fit(data, penalty, lambda, lambda1, lambda2, k, m, seed),
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(t) = flag {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(value) => {
            let t: usize = value.parse().map_err(|_| {
                CliError::Config(format!("{THREADS_ENV}={value} is not a thread count"))
            })?;
            if t == 0 {
                return Err(CliError::Config(format!("{THREADS_ENV} must be positive")));
            }
            Ok(Some(t))
        }
        Err(_) => Ok(None),
    }
}

fn simulate(
    config_path: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
    threads: Option<usize>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&config_path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let mut config =
        ExperimentConfig::from_json(&text).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let threads = resolve_threads(threads)?;

    let rows = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
            pool.install(|| run_sweep(&config))
        }
        None => run_sweep(&config),
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let file = File::create(&out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    write_csv(&rows, file).map_err(|e| CliError::Runtime(e.to_string()))?;
    eprintln!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn fixedpoint(lambda: f64, theta: f64, spectrum: Option<PathBuf>) -> Result<(), CliError> {
    let spectrum = match spectrum {
        Some(path) => {
            let file = File::open(&path).map_err(|e| {
                CliError::Config(format!("cannot read spectrum {}: {e}", path.display()))
            })?;
            read_spectrum_csv(file).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => SpectralDistribution::point_mass(1.0).expect("point mass is valid"),
    };
    let solution =
        solve_v(lambda, theta, &spectrum).map_err(|e| CliError::Config(e.to_string()))?;
    if solution.v.is_finite() {
        println!("v {:.16e}", solution.v);
        println!("residual {:.16e}", solution.residual);
    } else {
        println!("v inf");
        println!("residual 0");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn fit(
    data: PathBuf,
    penalty: PenaltyKind,
    lambda: Option<f64>,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    k: usize,
    m: usize,
    seed: u64,
) -> Result<(), CliError> {
    let penalty = match penalty {
        PenaltyKind::Ridge => PenaltyConfig::Ridge {
            lambda: lambda.ok_or_else(|| CliError::Config("ridge requires --lambda".into()))?,
        },
        PenaltyKind::Ridgeless => PenaltyConfig::Ridgeless,
        PenaltyKind::Lasso => PenaltyConfig::Lasso {
            lambda: lambda.ok_or_else(|| CliError::Config("lasso requires --lambda".into()))?,
        },
        PenaltyKind::ElasticNet => PenaltyConfig::ElasticNet {
            lambda1: lambda1
                .ok_or_else(|| CliError::Config("elastic-net requires --lambda1".into()))?,
            lambda2: lambda2
                .ok_or_else(|| CliError::Config("elastic-net requires --lambda2".into()))?,
        },
    };
    penalty
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let dataset = load_dataset_csv(&data)
        .map_err(|e| CliError::Config(format!("cannot load {}: {e}", data.display())))?;
    if k == 0 || k > dataset.n() {
        return Err(CliError::Config(format!(
            "--k must satisfy 1 <= k <= {}",
            dataset.n()
        )));
    }
    if m == 0 {
        return Err(CliError::Config("--M must be positive".into()));
    }
    let subsets =
        draw_subsamples(dataset.n(), k, m, seed).map_err(|e| CliError::Config(e.to_string()))?;
    let fit = fit_ensemble(&dataset.x, &dataset.y, &penalty, &subsets)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let report = RiskReport::compute(&fit);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(format!("serialization: {e}")))?;
    println!("{json}");
    Ok(())
}
