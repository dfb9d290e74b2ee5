//! Self-checks of the Granger-causality correspondences.
//!
//! Gaussian case: on a simulated driven AR pair, twice the Renyi transfer
//! entropy must match the Granger statistic at every order, and the Granger
//! statistic must match its population value. α-Gaussian case: the closed-form
//! conditional mutual information must be non-positive, non-decreasing in α,
//! vanish at α = 1 and follow its leading-order expansion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use renyite_core::analytic::{alpha_gaussian_cond_mi, granger_f};
use renyite_core::infoflow::rte_alphas;
use renyite_core::{EstimatorConfig, LagSpec, LogBase, MultiSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateConfig {
    pub length: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub estimator: EstimatorConfig,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { length: 100_000, seed: 1, alphas: vec![0.8, 1.0, 1.2, 1.5], estimator: EstimatorConfig::default() }
    }
}

/// Driven pair `x_t = a x_{t-1} + c y_{t-1} + e_t` with white unit-variance
/// `y` and `e`. Returns `(x, y)`.
pub fn driven_pair(n: usize, a: f64, c: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    y[0] = draw();
    for t in 1..n {
        let e = draw();
        y[t] = draw();
        x[t] = a * x[t - 1] + c * y[t - 1] + e;
    }
    (x, y)
}

/// Population Granger statistic of [`driven_pair`] with one lag each:
/// dropping `y` adds `c² Var(y)` to the residual variance.
pub fn driven_pair_granger(c: f64) -> f64 {
    (1.0 + c * c).ln()
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

/// The Gaussian checks, at natural-log units.
pub fn gaussian_checks(cfg: &ValidateConfig) -> Vec<Check> {
    let (a, c) = (0.5, 0.3);
    let (x, y) = driven_pair(cfg.length, a, c, cfg.seed);
    let mut out = Vec::new();
    let f = match granger_f(&x, &y, 1, 1, LogBase::E) {
        Ok(f) => f,
        Err(e) => return vec![check("granger-population", false, e.to_string())],
    };
    let f_pop = driven_pair_granger(c);
    out.push(check(
        "granger-population",
        (f - f_pop).abs() < 0.01,
        format!("F = {f:.5}, population {f_pop:.5}, tolerance 0.01"),
    ));

    let spec = LagSpec::new(vec![0], 1, vec![0]).unwrap();
    let est = EstimatorConfig { log_base: LogBase::E, ..cfg.estimator };
    let flows = MultiSeries::scalar(&x).and_then(|t| {
        let s = MultiSeries::scalar(&y)?;
        rte_alphas(&t, &s, &spec, &est, &cfg.alphas)
    });
    match flows {
        Ok(flows) => {
            for r in flows {
                let gap = 2.0 * r.value - f;
                let tol = (4.0 * r.std).max(0.01);
                out.push(check(
                    format!("granger-rte alpha={}", r.alpha),
                    gap.abs() < tol,
                    format!("2T - F = {gap:+.5} (T = {:.5} ± {:.5}), tolerance {tol:.5}", r.value, r.std),
                ));
            }
        }
        Err(e) => out.push(check("granger-rte", false, e.to_string())),
    }
    out
}

/// Lower end of the order range where the conditional MI is defined.
pub fn cond_mi_lower(k: usize, l: usize) -> f64 {
    let d = (1 + k + l) as f64;
    d / (d + 2.0)
}

/// `n` orders spread evenly over `(lower, 1]`.
pub fn cond_mi_grid(k: usize, l: usize, n: usize) -> Vec<f64> {
    let lo = cond_mi_lower(k, l);
    (1..=n).map(|i| lo + (1.0 - lo) * i as f64 / n as f64).collect()
}

/// Leading-order expansion `-l (α-1)² / 8` of the conditional MI.
pub fn cond_mi_leading_order(l: usize, alpha: f64) -> f64 {
    -(l as f64) * (alpha - 1.0).powi(2) / 8.0
}

pub fn alpha_gaussian_checks() -> Vec<Check> {
    let pairs: Vec<(usize, usize)> = (1..=10).flat_map(|k| [(k, 1), (k, 2)]).collect();
    let mi = |k, l, a| alpha_gaussian_cond_mi(k, l, a, LogBase::E);
    let mut out = Vec::new();

    let mut worst_sign = f64::NEG_INFINITY;
    let mut worst_step = f64::INFINITY;
    let mut errors = Vec::new();
    for &(k, l) in &pairs {
        let values: Vec<f64> = match cond_mi_grid(k, l, 50).into_iter().map(|a| mi(k, l, a)).collect() {
            Ok(v) => v,
            Err(e) => {
                errors.push(format!("k={k}, l={l}: {e}"));
                continue;
            }
        };
        worst_sign = values.iter().copied().fold(worst_sign, f64::max);
        worst_step = values.windows(2).map(|w| w[1] - w[0]).fold(worst_step, f64::min);
    }
    if !errors.is_empty() {
        out.push(check("cond-mi-domain", false, errors.join("; ")));
    }
    out.push(check("cond-mi-sign", worst_sign <= 0.0, format!("largest value {worst_sign:e} over 50-point grids")));
    out.push(check("cond-mi-monotone", worst_step >= 0.0, format!("smallest step {worst_step:e}")));

    let near_one = pairs.iter().map(|&(k, l)| mi(k, l, 1.0 - 1e-6).map(f64::abs)).collect::<Result<Vec<_>, _>>();
    let at_one = pairs.iter().map(|&(k, l)| mi(k, l, 1.0).map(f64::abs)).collect::<Result<Vec<_>, _>>();
    match (near_one, at_one) {
        (Ok(near), Ok(at)) => {
            let worst = near.iter().chain(&at).copied().fold(0.0, f64::max);
            out.push(check("cond-mi-limit", worst < 1e-8, format!("max |I| at α = 1 and 1 - 1e-6: {worst:e}")));
        }
        (Err(e), _) | (_, Err(e)) => out.push(check("cond-mi-limit", false, e.to_string())),
    }

    let alpha = 0.95;
    let mut worst = (0.0, 0, 0);
    for &(k, l) in &pairs {
        if let Ok(v) = mi(k, l, alpha) {
            let rel = (v / cond_mi_leading_order(l, alpha) - 1.0).abs();
            if rel > worst.0 {
                worst = (rel, k, l);
            }
        }
    }
    out.push(check(
        "cond-mi-leading-order",
        worst.0 < 0.2,
        format!(
            "worst relative deviation at α = {alpha}: {:.1}% (k={}, l={}), tolerance 20%",
            100.0 * worst.0,
            worst.1,
            worst.2
        ),
    ));
    out
}

pub fn run_validation(cfg: &ValidateConfig) -> Vec<Check> {
    let mut out = alpha_gaussian_checks();
    out.extend(gaussian_checks(cfg));
    out
}
