mod common;

use std::f64::consts::PI;

use common::{ar1, driven_ar, normals};
use renyite_core::analytic::{
    alpha_gaussian_cond_mi, alpha_gaussian_entropy_unit, gaussian_renyi_entropy, granger_f, taylor_correction,
    GaussianModel,
};
use renyite_core::LogBase;

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Renyi entropy of the unit-covariance α-Gaussian by direct quadrature of the
/// density `[1 + (1-α) r²]^{-1/(1-α)}`, normalised and rescaled numerically.
fn quadrature_entropy(dim: usize, alpha: f64) -> f64 {
    let p = 1.0 / (1.0 - alpha);
    let f = |r: f64| (1.0 + (1.0 - alpha) * r * r).powf(-p);
    // radial measure: 1-D uses the full line, 2-D the circumference 2πr
    let shell = |r: f64| if dim == 1 { 2.0 } else { 2.0 * PI * r };
    let (upper, n) = (80.0, 400_000);
    let z = simpson(|r| shell(r) * f(r), 0.0, upper, n);
    let second = simpson(|r| shell(r) * r * r * f(r), 0.0, upper, n) / z;
    let renyi = simpson(|r| shell(r) * (f(r) / z).powf(alpha), 0.0, upper, n);
    let component_variance = second / dim as f64;
    renyi.ln() / (1.0 - alpha) - 0.5 * dim as f64 * component_variance.ln()
}

#[test]
fn alpha_gaussian_entropy_matches_quadrature() {
    for (dim, alpha) in [(1, 0.9), (1, 0.7), (1, 0.99), (2, 0.99), (2, 0.8)] {
        let closed = alpha_gaussian_entropy_unit(dim, alpha, LogBase::E).unwrap();
        let numeric = quadrature_entropy(dim, alpha);
        assert!((closed - numeric).abs() < 1e-6, "D={dim} alpha={alpha}: {closed} vs {numeric}");
    }
    let two = alpha_gaussian_entropy_unit(2, 0.99, LogBase::E).unwrap();
    let one = alpha_gaussian_entropy_unit(1, 0.99, LogBase::E).unwrap();
    // not additive for α ≠ 1, but close to it near the Gaussian limit
    assert!((two - 2.0 * one).abs() < 0.02);
}

#[test]
fn alpha_gaussian_tends_to_gaussian() {
    let g = alpha_gaussian_entropy_unit(1, 1.0, LogBase::E).unwrap();
    assert!((g - 1.41894).abs() < 1e-5);
    let near = alpha_gaussian_entropy_unit(1, 1.0 - 1e-9, LogBase::E).unwrap();
    assert!((near - g).abs() < 1e-7);
}

#[test]
fn gaussian_entropy_decreases_with_order() {
    let m = GaussianModel::new(vec![2.0, 0.3, 0.3, 1.0], 2).unwrap();
    let grid: Vec<f64> = (1..=60).map(|i| 0.05 * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&a| gaussian_renyi_entropy(&m, a, LogBase::E).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn cond_mi_sign_monotonicity_and_stationary_point() {
    for l in [1, 2] {
        for k in 1..=10 {
            let lo = (1 + k + l) as f64 / (3 + k + l) as f64;
            let grid: Vec<f64> = (1..=50).map(|i| lo + (1.0 - lo) * i as f64 / 50.0).collect();
            let values: Vec<f64> = grid.iter().map(|&a| alpha_gaussian_cond_mi(k, l, a, LogBase::E).unwrap()).collect();
            assert!(values.iter().all(|v| *v <= 0.0), "k={k} l={l}");
            assert!(values.windows(2).all(|w| w[1] >= w[0]), "k={k} l={l}: {values:?}");
            assert_eq!(*values.last().unwrap(), 0.0);
            let near = alpha_gaussian_cond_mi(k, l, 1.0 - 1e-6, LogBase::E).unwrap();
            assert!(near.abs() < 1e-8, "k={k} l={l}: {near}");
        }
    }
}

#[test]
fn cond_mi_follows_its_taylor_expansion() {
    let (k, l) = (1, 2);
    let taylor = |alpha: f64| -(l as f64) * (alpha - 1.0f64).powi(2) / 8.0;
    assert!((taylor(0.95) + 0.000625).abs() < 1e-15);
    // The cubic term is sizeable (about -1.5 (α-1)³ here), so 20% agreement
    // needs |α - 1| well below 0.05.
    let at = |alpha: f64| alpha_gaussian_cond_mi(k, l, alpha, LogBase::E).unwrap();
    assert!((at(0.99) - taylor(0.99)).abs() < 0.2 * taylor(0.99).abs());
    assert!((at(0.95) - taylor(0.95)).abs() < 0.35 * taylor(0.95).abs());
    // F - 2T = -2 I, whose leading term is the Granger correction
    let i = at(0.995);
    assert!((-2.0 * i - taylor_correction(l, 0.995)).abs() < 0.05 * taylor_correction(l, 0.995));
    let bits = alpha_gaussian_cond_mi(k, l, 0.95, LogBase::TWO).unwrap();
    assert!((bits - at(0.95) / 2f64.ln()).abs() < 1e-15);
}

#[test]
fn cond_mi_remainder_is_third_order() {
    for (k, l) in [(1, 1), (3, 2), (8, 1)] {
        let ratios: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
            .iter()
            .map(|&d| {
                let i = alpha_gaussian_cond_mi(k, l, 1.0 - d, LogBase::E).unwrap();
                (i + l as f64 * d * d / 8.0) / d.powi(3)
            })
            .collect();
        let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) - ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(ratios.iter().all(|r| r.abs() < 50.0), "{ratios:?}");
        assert!(spread < 0.5 * ratios[0].abs().max(1.0), "{ratios:?}");
    }
}

#[test]
fn granger_statistic_of_a_driven_pair() {
    let (x, y) = driven_ar(100_000, 0.5, 0.3, 1);
    let f = granger_f(&x, &y, 1, 1, LogBase::E).unwrap();
    assert!((f - 1.09f64.ln()).abs() < 0.01, "{f}");
    let scaled_x: Vec<f64> = x.iter().map(|v| 10.0 * v).collect();
    let scaled_y: Vec<f64> = y.iter().map(|v| 10.0 * v).collect();
    let g = granger_f(&scaled_x, &scaled_y, 1, 1, LogBase::E).unwrap();
    assert!((f - g).abs() < 1e-10);
    let bits = granger_f(&x, &y, 1, 1, LogBase::TWO).unwrap();
    assert!((bits - f / 2f64.ln()).abs() < 1e-12);
}

#[test]
fn granger_statistic_vanishes_without_coupling() {
    let x = ar1(100_000, 0.6, 2);
    let y = normals(100_000, 3);
    let f = granger_f(&x, &y, 2, 3, LogBase::E).unwrap();
    assert!(f < 0.005 && f > -1e-12, "{f}");
}
