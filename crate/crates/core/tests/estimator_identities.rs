//! Estimator identities and brute-force cross-checks: every formula is
//! recomputed here from raw residuals and masks, independently of the
//! estimator module's internals.

use cgcv_core::datagen::{gen_gaussian_linear, GaussianLinearSpec, Spectrum};
use cgcv_core::ensemble::{draw_subsamples, fit_ensemble, EnsembleFit, IndexSet};
use cgcv_core::estimators::{
    cgcv, component_full, component_sub, correction_term, gcv_full_data, gcv_union,
    intermediate_estimator, RiskReport, Variant,
};
use cgcv_core::solvers::PenaltyConfig;
use nalgebra::{DMatrix, DVector};

fn test_design(seed: u64, n: usize, p: usize) -> (DMatrix<f64>, DVector<f64>) {
    let spec = GaussianLinearSpec {
        n,
        p,
        snr: 1.0,
        sigma2: 1.0,
        spectrum: Spectrum::Isotropic,
        sparsity_tail: 0,
    };
    let (ds, _, _) = gen_gaussian_linear(&spec, 1, seed).unwrap();
    (ds.x, ds.y)
}

#[test]
fn gcv_union_matches_masked_brute_force() {
    let (x, y) = test_design(5, 60, 8);
    let subsets = draw_subsamples(60, 30, 2, 9).unwrap();
    let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 0.5 }, &subsets).unwrap();

    // Brute force: build the union mask, average the component coefficient
    // vectors by hand, and evaluate the masked expression from scratch.
    let mut mask = [false; 60];
    for s in &subsets {
        for &i in s.indices() {
            mask[i] = true;
        }
    }
    let union: Vec<usize> = (0..60).filter(|&i| mask[i]).collect();
    let mut beta_bar = DVector::zeros(8);
    for c in &fit.components {
        beta_bar += &c.fit.beta;
    }
    beta_bar /= 2.0;
    let residual = &y - &x * &beta_bar;
    let masked_error: f64 = union
        .iter()
        .map(|&i| residual[i] * residual[i])
        .sum::<f64>()
        / union.len() as f64;
    let tdf = (fit.components[0].fit.df + fit.components[1].fit.df) / 2.0;
    let expected = masked_error / (1.0 - tdf / union.len() as f64).powi(2);

    let got = gcv_union(&fit).unwrap();
    assert!(
        (got - expected).abs() < 1e-12 * expected.abs().max(1.0),
        "gcv_union {got} vs brute force {expected}"
    );
}

#[test]
fn component_sub_matches_masked_brute_force() {
    let (x, y) = test_design(6, 80, 10);
    let subsets = draw_subsamples(80, 50, 2, 10).unwrap();
    let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 1.0 }, &subsets).unwrap();

    let r0 = &y - &x * &fit.components[0].fit.beta;
    let r1 = &y - &x * &fit.components[1].fit.beta;
    let overlap: Vec<usize> = subsets[0]
        .indices()
        .iter()
        .filter(|i| subsets[1].indices().contains(i))
        .cloned()
        .collect();
    let inner: f64 = overlap.iter().map(|&i| r0[i] * r1[i]).sum();
    let d0 = fit.components[0].fit.df / 50.0;
    let d1 = fit.components[1].fit.df / 50.0;
    let expected = inner / overlap.len() as f64 / ((1.0 - d0) * (1.0 - d1));

    let got = component_sub(&fit, 0, 1).unwrap();
    assert!(
        (got - expected).abs() < 1e-12 * expected.abs().max(1.0),
        "component_sub {got} vs brute force {expected}"
    );
}

/// With one component the union is its subsample, so the union GCV is the
/// ordinary GCV evaluated on those k rows.
#[test]
fn single_component_union_gcv_is_ordinary_gcv() {
    let (x, y) = test_design(12, 50, 7);
    let subsets = draw_subsamples(50, 30, 1, 14).unwrap();
    let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 0.6 }, &subsets).unwrap();
    let residual = &y - &x * &fit.components[0].fit.beta;
    let masked: f64 = subsets[0]
        .indices()
        .iter()
        .map(|&i| residual[i] * residual[i])
        .sum();
    let expected = masked / 30.0 / (1.0 - fit.tdf / 30.0).powi(2);
    let got = gcv_union(&fit).unwrap();
    assert!((got - expected).abs() < 1e-12 * expected.abs().max(1.0));
}

#[test]
fn component_full_matches_direct_expression() {
    let (x, y) = test_design(7, 70, 9);
    let subsets = draw_subsamples(70, 40, 2, 11).unwrap();
    let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 0.3 }, &subsets).unwrap();

    let r0 = &y - &x * &fit.components[0].fit.beta;
    let r1 = &y - &x * &fit.components[1].fit.beta;
    let overlap = subsets[0]
        .indices()
        .iter()
        .filter(|i| subsets[1].indices().contains(i))
        .count() as f64;
    let (d0, d1) = (fit.components[0].fit.df, fit.components[1].fit.df);
    let n = 70.0;
    let denom = 1.0 - d0 / n - d1 / n + d0 * d1 / (40.0 * 40.0) * overlap / n;
    let expected = r0.dot(&r1) / n / denom;
    let got = component_full(&fit, 0, 1).unwrap();
    assert!((got - expected).abs() < 1e-12 * expected.abs().max(1.0));
}

/// With every subsample equal to the full sample, all estimators collapse
/// onto ordinary GCV.
#[test]
fn exact_identities_at_full_sample() {
    for (seed, m, lambda) in [(1u64, 1usize, 0.01), (2, 3, 0.01), (3, 1, 1.0), (4, 3, 1.0)] {
        let (x, y) = test_design(seed, 60, 15);
        let subsets = vec![IndexSet::full(60); m];
        let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda }, &subsets).unwrap();
        let g = gcv_full_data(&fit).unwrap();
        let scale = g.abs().max(1.0);
        for value in [
            gcv_union(&fit).unwrap(),
            intermediate_estimator(&fit, Variant::Sub).unwrap(),
            intermediate_estimator(&fit, Variant::Full).unwrap(),
            cgcv(&fit, Variant::Sub).unwrap(),
            cgcv(&fit, Variant::Full).unwrap(),
        ] {
            assert!(
                (value - g).abs() < 1e-10 * scale,
                "estimator {value} deviates from gcv {g} (m = {m}, lambda = {lambda})"
            );
        }
        assert_eq!(correction_term(&fit, Variant::Sub).unwrap(), 0.0);
        assert_eq!(correction_term(&fit, Variant::Full).unwrap(), 0.0);
    }
}

/// For a single component, the full-estimator denominator splits into an
/// in-sample and an out-of-sample part that recombine into `(1 - d/n)^2`:
/// `(k/n)(1 - d/k)^2 + (n-k)/n - ((n-k)/k)(d/n)^2 = (1 - d/n)^2`.
#[test]
fn single_component_denominator_identity() {
    for (k, seed) in [(40usize, 8u64), (60, 9)] {
        let (x, y) = test_design(seed, 60, 12);
        let subsets = draw_subsamples(60, k, 1, seed).unwrap();
        let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 0.7 }, &subsets).unwrap();
        let d = fit.tdf;
        let (nf, kf) = (60.0f64, k as f64);
        let lhs =
            kf / nf * (1.0 - d / kf).powi(2) + (nf - kf) / nf - (nf - kf) / kf * (d / nf).powi(2);
        let rhs = (1.0 - d / nf).powi(2);
        assert!(
            (lhs - rhs).abs() < 1e-14,
            "identity violated at k = {k}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn component_matrices_are_swap_symmetric() {
    let (x, y) = test_design(10, 50, 6);
    let subsets = draw_subsamples(50, 30, 4, 12).unwrap();
    let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 0.2 }, &subsets).unwrap();
    for m in 0..4 {
        for l in 0..4 {
            assert_eq!(
                component_sub(&fit, m, l).unwrap(),
                component_sub(&fit, l, m).unwrap()
            );
            assert_eq!(
                component_full(&fit, m, l).unwrap(),
                component_full(&fit, l, m).unwrap()
            );
        }
    }
}

#[test]
fn estimators_are_invariant_under_component_permutation() {
    let (x, y) = test_design(11, 50, 6);
    let subsets = draw_subsamples(50, 30, 3, 13).unwrap();
    let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 0.4 }, &subsets).unwrap();
    let mut reversed_components = fit.components.clone();
    reversed_components.reverse();
    let reversed = EnsembleFit::from_components(reversed_components, 50).unwrap();

    assert!((fit.tdf - reversed.tdf).abs() < 1e-14);
    assert!((&fit.ensemble_beta - &reversed.ensemble_beta).amax() < 1e-14);
    let pairs = [
        (
            gcv_full_data(&fit).unwrap(),
            gcv_full_data(&reversed).unwrap(),
        ),
        (gcv_union(&fit).unwrap(), gcv_union(&reversed).unwrap()),
        (
            intermediate_estimator(&fit, Variant::Sub).unwrap(),
            intermediate_estimator(&reversed, Variant::Sub).unwrap(),
        ),
        (
            intermediate_estimator(&fit, Variant::Full).unwrap(),
            intermediate_estimator(&reversed, Variant::Full).unwrap(),
        ),
        (
            cgcv(&fit, Variant::Full).unwrap(),
            cgcv(&reversed, Variant::Full).unwrap(),
        ),
    ];
    for (a, b) in pairs {
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn corrections_are_nonnegative() {
    for seed in 20..26u64 {
        let (x, y) = test_design(seed, 45, 7);
        let subsets = draw_subsamples(45, 25, 3, seed).unwrap();
        let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda: 0.05 }, &subsets).unwrap();
        assert!(correction_term(&fit, Variant::Sub).unwrap() >= 0.0);
        assert!(correction_term(&fit, Variant::Full).unwrap() >= 0.0);
    }
}

/// Headline-scale smoke run: n = 2000, p = 500, k = 800, with penalties
/// spanning five orders of magnitude; every estimator stays finite.
#[test]
fn large_design_produces_finite_estimates() {
    let (x, y) = test_design(30, 2000, 500);
    let subsets = draw_subsamples(2000, 800, 2, 31).unwrap();
    for lambda in [1e-3, 1.0, 1e2] {
        let fit = fit_ensemble(&x, &y, &PenaltyConfig::Ridge { lambda }, &subsets).unwrap();
        let report = RiskReport::compute(&fit);
        for (name, value) in [
            ("gcv", report.gcv_full_data.clone()),
            ("gcv_union", report.gcv_union.clone()),
            ("r_sub", report.r_sub.clone()),
            ("r_full", report.r_full.clone()),
            ("cgcv_sub", report.cgcv_sub.clone()),
            ("cgcv_full", report.cgcv_full.clone()),
        ] {
            let v = value.unwrap_or_else(|e| panic!("{name} failed at lambda {lambda}: {e}"));
            assert!(v.is_finite(), "{name} not finite at lambda {lambda}");
        }
    }
}
