//! Data-driven risk estimators for subsample ensembles.
//!
//! For an ensemble of M components with full-sample residuals `r_m`, degrees
//! of freedom `df_m`, and index sets `I_m`, this module computes
//!
//! - [`gcv_full_data`]: `(||rbar||^2 / n) / (1 - tdf/n)^2` with `rbar` the
//!   ensemble residual, the GCV extension that uses all n rows;
//! - [`gcv_union`]: the same construction restricted to the realized union
//!   of the subsamples;
//! - [`component_sub`] / [`component_full`]: estimates of the pairwise risk
//!   components, using only the overlap `I_m ∩ I_l` or all n observations
//!   with a modified degrees-of-freedom adjustment;
//! - [`intermediate_estimator`]: the average of all M^2 pairwise component
//!   estimates;
//! - [`cgcv`]: corrected GCV, which subtracts from GCV a scalar correction
//!   built from the M diagonal component estimates only, so it runs in
//!   linear rather than quadratic time in M.
//!
//! GCV over-estimates the risk of any finite ensemble with more than one
//! component; the correction removes that bias while keeping GCV's
//! computational profile.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ensemble::{intersection_size, EnsembleFit};

/// Which intermediate estimator a pairwise component uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Residual products over the overlapping observations only.
    Sub,
    /// Residual products over all observations.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimatorError {
    #[error("degenerate denominator in {context}")]
    DegenerateDenominator { context: String },
    #[error("components {m} and {l} have empty overlap")]
    EmptyOverlap { m: usize, l: usize },
}

/// Ensemble GCV on all n rows: training error of the averaged predictor
/// divided by `(1 - tdf/n)^2`.
pub fn gcv_full_data(fit: &EnsembleFit) -> Result<f64, EstimatorError> {
    let n = fit.n as f64;
    let shrink = 1.0 - fit.tdf / n;
    if shrink <= 0.0 {
        return Err(EstimatorError::DegenerateDenominator {
            context: format!("gcv: tdf = {} >= n = {}", fit.tdf, fit.n),
        });
    }
    let rbar = fit.ensemble_residual();
    Ok(rbar.norm_squared() / n / (shrink * shrink))
}

/// Ensemble GCV restricted to the realized union of the subsamples.
pub fn gcv_union(fit: &EnsembleFit) -> Result<f64, EstimatorError> {
    let mut in_union = vec![false; fit.n];
    for c in &fit.components {
        for &i in c.indices.indices() {
            in_union[i] = true;
        }
    }
    let union_size = in_union.iter().filter(|&&b| b).count();
    let u = union_size as f64;
    let shrink = 1.0 - fit.tdf / u;
    if shrink <= 0.0 {
        return Err(EstimatorError::DegenerateDenominator {
            context: format!("gcv_union: tdf = {} >= |union| = {union_size}", fit.tdf),
        });
    }
    let rbar = fit.ensemble_residual();
    let masked: f64 = in_union
        .iter()
        .zip(rbar.iter())
        .filter(|(b, _)| **b)
        .map(|(_, r)| r * r)
        .sum();
    Ok(masked / u / (shrink * shrink))
}

/// Overlap estimate of the (m, l) risk component:
/// `[r_m' L_{m∩l} r_l / |I_m ∩ I_l|] / [(1 - df_m/|I_m|)(1 - df_l/|I_l|)]`.
pub fn component_sub(fit: &EnsembleFit, m: usize, l: usize) -> Result<f64, EstimatorError> {
    let cm = &fit.components[m];
    let cl = &fit.components[l];
    let overlap = intersection_size(&cm.indices, &cl.indices);
    if overlap == 0 {
        return Err(EstimatorError::EmptyOverlap { m, l });
    }
    let factor_m = 1.0 - cm.fit.df / cm.indices.len() as f64;
    let factor_l = 1.0 - cl.fit.df / cl.indices.len() as f64;
    if factor_m <= 0.0 || factor_l <= 0.0 {
        return Err(EstimatorError::DegenerateDenominator {
            context: format!("component_sub({m},{l}): df reaches subsample size"),
        });
    }
    // Merge over the two sorted index lists; accumulate residual products
    // on the shared indices.
    let (xs, ys) = (cm.indices.indices(), cl.indices.indices());
    let (mut i, mut j) = (0, 0);
    let mut inner = 0.0;
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let row = xs[i];
                inner += cm.full_residual[row] * cl.full_residual[row];
                i += 1;
                j += 1;
            }
        }
    }
    Ok(inner / overlap as f64 / (factor_m * factor_l))
}

/// Full-data estimate of the (m, l) risk component:
/// `[r_m' r_l / n]` over
/// `1 - df_m/n - df_l/n + (df_m df_l / (|I_m| |I_l|)) |I_m ∩ I_l| / n`.
pub fn component_full(fit: &EnsembleFit, m: usize, l: usize) -> Result<f64, EstimatorError> {
    let cm = &fit.components[m];
    let cl = &fit.components[l];
    let n = fit.n as f64;
    let overlap = intersection_size(&cm.indices, &cl.indices) as f64;
    let km = cm.indices.len() as f64;
    let kl = cl.indices.len() as f64;
    let denom =
        1.0 - cm.fit.df / n - cl.fit.df / n + (cm.fit.df * cl.fit.df / (km * kl)) * overlap / n;
    if denom <= 0.0 {
        return Err(EstimatorError::DegenerateDenominator {
            context: format!("component_full({m},{l}): denominator {denom} <= 0"),
        });
    }
    let inner = cm.full_residual.dot(&cl.full_residual);
    Ok(inner / n / denom)
}

fn component(
    fit: &EnsembleFit,
    variant: Variant,
    m: usize,
    l: usize,
) -> Result<f64, EstimatorError> {
    match variant {
        Variant::Sub => component_sub(fit, m, l),
        Variant::Full => component_full(fit, m, l),
    }
}

/// `(1/M^2) * sum over all pairs (m, l)` of the chosen component estimate.
pub fn intermediate_estimator(fit: &EnsembleFit, variant: Variant) -> Result<f64, EstimatorError> {
    let m_total = fit.m();
    let mut sum = 0.0;
    for m in 0..m_total {
        for l in m..m_total {
            let value = component(fit, variant, m, l)?;
            sum += if l == m { value } else { 2.0 * value };
        }
    }
    Ok(sum / (m_total * m_total) as f64)
}

/// The additive correction that [`cgcv`] subtracts from [`gcv_full_data`]:
/// `(1/M) (tdf/n)^2 / (1 - tdf/n)^2 * (1/M) sum_m (n/|I_m| - 1) Rhat_{m,m}`.
///
/// Nonnegative whenever the diagonal component estimates are, and exactly
/// zero when every subsample is the full sample.
pub fn correction_term(fit: &EnsembleFit, variant: Variant) -> Result<f64, EstimatorError> {
    let n = fit.n as f64;
    let shrink = 1.0 - fit.tdf / n;
    if shrink <= 0.0 {
        return Err(EstimatorError::DegenerateDenominator {
            context: format!("cgcv correction: tdf = {} >= n = {}", fit.tdf, fit.n),
        });
    }
    let m_total = fit.m() as f64;
    let mut weighted = 0.0;
    for m in 0..fit.m() {
        let factor = n / fit.components[m].indices.len() as f64 - 1.0;
        if factor != 0.0 {
            weighted += factor * component(fit, variant, m, m)?;
        }
    }
    let ratio = (fit.tdf / n) / shrink;
    Ok(ratio * ratio * weighted / (m_total * m_total))
}

/// Corrected GCV: [`gcv_full_data`] minus [`correction_term`]. Consistent
/// for any ensemble size, at O(M) cost beyond the ensemble fit itself.
pub fn cgcv(fit: &EnsembleFit, variant: Variant) -> Result<f64, EstimatorError> {
    Ok(gcv_full_data(fit)? - correction_term(fit, variant)?)
}

/// All estimators evaluated on one ensemble, with the pairwise component
/// matrices computed once and shared between the intermediate estimators and
/// the CGCV corrections. Individual cells may fail (empty overlap, vanishing
/// adjustment) without invalidating the rest of the report.
#[derive(Debug, Clone)]
pub struct RiskReport {
    pub n: usize,
    pub m: usize,
    pub gcv_full_data: Result<f64, EstimatorError>,
    pub gcv_union: Result<f64, EstimatorError>,
    pub r_sub: Result<f64, EstimatorError>,
    pub r_full: Result<f64, EstimatorError>,
    pub cgcv_sub: Result<f64, EstimatorError>,
    pub cgcv_full: Result<f64, EstimatorError>,
    pub correction_sub: Result<f64, EstimatorError>,
    pub correction_full: Result<f64, EstimatorError>,
    pub component_matrix_sub: Vec<Vec<Result<f64, EstimatorError>>>,
    pub component_matrix_full: Vec<Vec<Result<f64, EstimatorError>>>,
}

impl RiskReport {
    #[allow(clippy::needless_range_loop)]
    pub fn compute(fit: &EnsembleFit) -> Self {
        let m_total = fit.m();
        let matrix = |variant: Variant| {
            let mut cells: Vec<Vec<Result<f64, EstimatorError>>> =
                vec![vec![Ok(0.0); m_total]; m_total];
            for m in 0..m_total {
                for l in m..m_total {
                    let value = component(fit, variant, m, l);
                    cells[m][l] = value.clone();
                    cells[l][m] = value;
                }
            }
            cells
        };
        let matrix_sub = matrix(Variant::Sub);
        let matrix_full = matrix(Variant::Full);

        // Same accumulation order as `intermediate_estimator`, so the two
        // routes agree bit for bit.
        let aggregate = |cells: &Vec<Vec<Result<f64, EstimatorError>>>| {
            let mut sum = 0.0;
            for m in 0..m_total {
                for l in m..m_total {
                    let value = cells[m][l].clone()?;
                    sum += if l == m { value } else { 2.0 * value };
                }
            }
            Ok(sum / (m_total * m_total) as f64)
        };

        let gcv = gcv_full_data(fit);
        let n = fit.n as f64;
        let correction = |cells: &Vec<Vec<Result<f64, EstimatorError>>>| {
            let shrink = 1.0 - fit.tdf / n;
            if shrink <= 0.0 {
                return Err(EstimatorError::DegenerateDenominator {
                    context: format!("cgcv correction: tdf = {} >= n = {}", fit.tdf, fit.n),
                });
            }
            let mut weighted = 0.0;
            for m in 0..m_total {
                let factor = n / fit.components[m].indices.len() as f64 - 1.0;
                if factor != 0.0 {
                    weighted += factor * cells[m][m].clone()?;
                }
            }
            let ratio = (fit.tdf / n) / shrink;
            Ok(ratio * ratio * weighted / (m_total as f64 * m_total as f64))
        };
        let correction_sub = correction(&matrix_sub);
        let correction_full = correction(&matrix_full);
        let combine = |c: &Result<f64, EstimatorError>| match (&gcv, c) {
            (Ok(g), Ok(c)) => Ok(g - c),
            (Err(e), _) => Err(e.clone()),
            (_, Err(e)) => Err(e.clone()),
        };

        RiskReport {
            n: fit.n,
            m: m_total,
            cgcv_sub: combine(&correction_sub),
            cgcv_full: combine(&correction_full),
            gcv_full_data: gcv,
            gcv_union: gcv_union(fit),
            r_sub: aggregate(&matrix_sub),
            r_full: aggregate(&matrix_full),
            correction_sub,
            correction_full,
            component_matrix_sub: matrix_sub,
            component_matrix_full: matrix_full,
        }
    }
}

fn serialize_cell<S: Serializer>(
    cell: &Result<f64, EstimatorError>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Cell<'a> {
        value: Option<f64>,
        status: &'a str,
    }
    let (value, status) = match cell {
        Ok(v) => (Some(*v), "ok"),
        Err(EstimatorError::DegenerateDenominator { .. }) => (None, "degenerate"),
        Err(EstimatorError::EmptyOverlap { .. }) => (None, "empty_overlap"),
    };
    Cell { value, status }.serialize(serializer)
}

impl Serialize for RiskReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Cells<'a>(&'a Vec<Vec<Result<f64, EstimatorError>>>);
        impl Serialize for Cells<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_seq(self.0.iter().map(Row))
            }
        }
        struct Row<'a>(&'a Vec<Result<f64, EstimatorError>>);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_seq(self.0.iter().map(Wrapped))
            }
        }
        struct Wrapped<'a>(&'a Result<f64, EstimatorError>);
        impl Serialize for Wrapped<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serialize_cell(self.0, serializer)
            }
        }

        let mut s = serializer.serialize_struct("RiskReport", 12)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("m", &self.m)?;
        s.serialize_field("gcv_full_data", &Wrapped(&self.gcv_full_data))?;
        s.serialize_field("gcv_union", &Wrapped(&self.gcv_union))?;
        s.serialize_field("r_sub", &Wrapped(&self.r_sub))?;
        s.serialize_field("r_full", &Wrapped(&self.r_full))?;
        s.serialize_field("cgcv_sub", &Wrapped(&self.cgcv_sub))?;
        s.serialize_field("cgcv_full", &Wrapped(&self.cgcv_full))?;
        s.serialize_field("correction_sub", &Wrapped(&self.correction_sub))?;
        s.serialize_field("correction_full", &Wrapped(&self.correction_full))?;
        s.serialize_field("component_matrix_sub", &Cells(&self.component_matrix_sub))?;
        s.serialize_field("component_matrix_full", &Cells(&self.component_matrix_full))?;
        s.end()
    }
}
