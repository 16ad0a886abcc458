//! Random subsamples and the ensemble of per-subsample fits.
//!
//! Subsamples are simple random samples without replacement, drawn
//! independently of the data. The ensemble predictor averages the component
//! coefficient vectors; its degrees of freedom is the average of the
//! component degrees of freedom.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

use crate::rng::{stream_rng, TAG_SUBSAMPLE};
use crate::solvers::{fit_penalized_warm, FitResult, PenaltyConfig, SolverError};

/// A subset of row indices in `[0, n)`, kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Validates that `indices` is strictly increasing (hence duplicate-free).
    pub fn new(indices: Vec<usize>) -> Result<Self, EnsembleError> {
        if indices.is_empty() {
            return Err(EnsembleError::InvalidIndexSet("empty index set".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EnsembleError::InvalidIndexSet(
                "indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { indices })
    }

    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn max_index(&self) -> usize {
        *self.indices.last().expect("index sets are nonempty")
    }
}

/// `|a intersect b|` by a linear merge over the sorted index lists.
pub fn intersection_size(a: &IndexSet, b: &IndexSet) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    let (xs, ys) = (a.indices(), b.indices());
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Draws `m` i.i.d. uniform size-`k` subsets of `[0, n)` without replacement.
///
/// Each draw uses its own random stream derived from `(seed, draw_index)`,
/// so the first draws of two calls with different `m` coincide and results
/// do not depend on evaluation order.
pub fn draw_subsamples(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
) -> Result<Vec<IndexSet>, EnsembleError> {
    if k == 0 || k > n {
        return Err(EnsembleError::InvalidInput(format!(
            "subsample size k = {k} must satisfy 1 <= k <= n = {n}"
        )));
    }
    if m == 0 {
        return Err(EnsembleError::InvalidInput(
            "ensemble size m must be at least 1".into(),
        ));
    }
    let mut out = Vec::with_capacity(m);
    for draw in 0..m {
        let mut rng = stream_rng(seed, &[TAG_SUBSAMPLE, draw as u64]);
        // Partial Fisher-Yates: after k swaps the prefix is an exact
        // uniform sample without replacement.
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.random_range(i..n);
            pool.swap(i, j);
        }
        let mut indices = pool[..k].to_vec();
        indices.sort_unstable();
        out.push(IndexSet { indices });
    }
    Ok(out)
}

/// One fitted ensemble component, with its residual on all `n` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleComponent {
    pub indices: IndexSet,
    pub fit: FitResult,
    /// `y - X * beta` over the full sample, not just the subsample.
    pub full_residual: DVector<f64>,
}

/// The fitted ensemble: components plus the averaged coefficient vector and
/// averaged degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFit {
    pub components: Vec<EnsembleComponent>,
    /// Number of rows in the full sample.
    pub n: usize,
    /// Average of the component coefficient vectors.
    pub ensemble_beta: DVector<f64>,
    /// Average of the component degrees of freedom.
    pub tdf: f64,
}

impl EnsembleFit {
    /// Assembles an ensemble from already-fitted components, recomputing the
    /// averaged quantities.
    pub fn from_components(
        components: Vec<EnsembleComponent>,
        n: usize,
    ) -> Result<Self, EnsembleError> {
        if components.is_empty() {
            return Err(EnsembleError::InvalidInput(
                "ensemble needs at least one component".into(),
            ));
        }
        let p = components[0].fit.beta.len();
        for (m, c) in components.iter().enumerate() {
            if c.full_residual.len() != n {
                return Err(EnsembleError::InvalidInput(format!(
                    "component {m}: residual length {} does not match n = {n}",
                    c.full_residual.len()
                )));
            }
            if c.fit.beta.len() != p {
                return Err(EnsembleError::InvalidInput(format!(
                    "component {m}: coefficient length {} does not match {p}",
                    c.fit.beta.len()
                )));
            }
            if c.indices.max_index() >= n {
                return Err(EnsembleError::InvalidInput(format!(
                    "component {m}: index {} out of range for n = {n}",
                    c.indices.max_index()
                )));
            }
        }
        let mf = components.len() as f64;
        let mut ensemble_beta = DVector::zeros(p);
        let mut tdf = 0.0;
        for c in &components {
            ensemble_beta += &c.fit.beta;
            tdf += c.fit.df;
        }
        ensemble_beta /= mf;
        tdf /= mf;
        Ok(Self {
            components,
            n,
            ensemble_beta,
            tdf,
        })
    }

    /// Ensemble size `M`.
    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// Residual of the averaged predictor, `y - X * ensemble_beta`; equals
    /// the average of the component residuals by linearity.
    pub fn ensemble_residual(&self) -> DVector<f64> {
        let mut r = DVector::zeros(self.n);
        for c in &self.components {
            r += &c.full_residual;
        }
        r /= self.m() as f64;
        r
    }

    /// A new ensemble built from the first `m` components.
    pub fn prefix(&self, m: usize) -> Result<Self, EnsembleError> {
        if m == 0 || m > self.m() {
            return Err(EnsembleError::InvalidInput(format!(
                "prefix size {m} out of range for ensemble of {}",
                self.m()
            )));
        }
        Self::from_components(self.components[..m].to_vec(), self.n)
    }
}

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("component {index} failed: {source}")]
    Component {
        index: usize,
        #[source]
        source: SolverError,
    },
}

/// Fits one component per subset with the same penalty and assembles the
/// ensemble. Residuals are evaluated on all `n` rows.
pub fn fit_ensemble(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    penalty: &PenaltyConfig,
    subsets: &[IndexSet],
) -> Result<EnsembleFit, EnsembleError> {
    let n = x.nrows();
    if y.len() != n {
        return Err(EnsembleError::InvalidInput(format!(
            "response length {} does not match {n} rows",
            y.len()
        )));
    }
    if subsets.is_empty() {
        return Err(EnsembleError::InvalidInput(
            "ensemble needs at least one subset".into(),
        ));
    }
    let mut components = Vec::with_capacity(subsets.len());
    for (m, subset) in subsets.iter().enumerate() {
        if subset.max_index() >= n {
            return Err(EnsembleError::InvalidInput(format!(
                "subset {m}: index {} out of range for n = {n}",
                subset.max_index()
            )));
        }
        components.push(
            fit_component(x, y, penalty, subset, None)
                .map_err(|source| EnsembleError::Component { index: m, source })?,
        );
    }
    EnsembleFit::from_components(components, n)
}

/// Fits a single component on `subset`, optionally warm-started. Exposed so
/// sweep drivers can reuse coefficient paths across a penalty grid.
pub fn fit_component(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    penalty: &PenaltyConfig,
    subset: &IndexSet,
    warm: Option<&DVector<f64>>,
) -> Result<EnsembleComponent, SolverError> {
    let x_sub = x.select_rows(subset.indices().iter());
    let y_sub = y.select_rows(subset.indices().iter());
    let fit = fit_penalized_warm(&x_sub, &y_sub, penalty, warm)?;
    let full_residual = y - x * &fit.beta;
    Ok(EnsembleComponent {
        indices: subset.clone(),
        fit,
        full_residual,
    })
}
