//! Closed forms for α-Gaussian variables, the maximisers of Renyi entropy at
//! fixed covariance. Writing `p = 1/(1-α)` and `q = α/(1-α)`, the entropy of a
//! unit-covariance `D`-dimensional α-Gaussian is
//!
//! ```text
//! H = (D/2) ln(2π q) + ln Γ(p - D/2) - ln Γ(p) + (D/2 - p) ln(1 - D/(2q))
//! ```
//!
//! for `D/(D+2) < α < 1`, and `(D/2) ln(2πe)` at α = 1.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::estimator::LogBase;
use crate::numkernel::gamma_ln_ratio;

fn check_order(alpha: f64, dim: usize) -> Result<()> {
    let lower = dim as f64 / (dim as f64 + 2.0);
    if !(alpha > lower && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} outside the finite-covariance range ({lower}, 1] for dimension {dim}"
        )));
    }
    Ok(())
}

/// `(D/2 - p) ln(1 - D/(2q))`; the `ln q` part cancels wherever it is used
/// except in the entropy itself, which adds it back.
fn power_term(dim: f64, p: f64, q: f64) -> f64 {
    (dim / 2.0 - p) * (-dim / (2.0 * q)).ln_1p()
}

/// Renyi entropy of the zero-mean, unit-covariance α-Gaussian in `dim` dimensions.
pub fn alpha_gaussian_entropy_unit(dim: usize, alpha: f64, log_base: LogBase) -> Result<f64> {
    if dim == 0 {
        return Err(Error::Argument("dimension must be at least 1".into()));
    }
    check_order(alpha, dim)?;
    let d = dim as f64;
    if alpha == 1.0 {
        return Ok(log_base.from_nats(0.5 * d * (2.0 * PI * E).ln()));
    }
    let p = 1.0 / (1.0 - alpha);
    let q = alpha / (1.0 - alpha);
    let nats = 0.5 * d * (2.0 * PI * q).ln() + gamma_ln_ratio(p, -d / 2.0)? + power_term(d, p, q);
    Ok(log_base.from_nats(nats))
}

/// Conditional mutual information `I_α(Z¹ : Zˡ | Zᵏ)` between unit-covariance
/// α-Gaussian blocks of sizes 1, `l` and `k`. Non-positive, zero at α = 1.
pub fn alpha_gaussian_cond_mi(k: usize, l: usize, alpha: f64, log_base: LogBase) -> Result<f64> {
    if k == 0 || l == 0 {
        return Err(Error::Argument("block sizes k and l must be at least 1".into()));
    }
    check_order(alpha, 1 + k + l)?;
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let p = 1.0 / (1.0 - alpha);
    let q = alpha / (1.0 - alpha);
    let (k, l) = (k as f64, l as f64);
    // ln Γ(p - (D+1)/2) - ln Γ(p - D/2) for D = k and D = k + l
    let gamma_step = |d: f64| gamma_ln_ratio(p - d / 2.0, -0.5);
    let power_step = |d: f64| power_term(d + 1.0, p, q) - power_term(d, p, q);
    let nats = (gamma_step(k)? + power_step(k)) - (gamma_step(k + l)? + power_step(k + l));
    Ok(log_base.from_nats(nats))
}

/// Leading-order gap `F - 2T = l (α-1)² / 4` between Granger causality and
/// twice the Renyi transfer entropy for α-Gaussian processes.
pub fn taylor_correction(l: usize, alpha: f64) -> f64 {
    l as f64 * (alpha - 1.0).powi(2) / 4.0
}

#[cfg(test)]
fn direct_cond_mi(k: usize, l: usize, alpha: f64) -> f64 {
    let h = |d: usize| alpha_gaussian_entropy_unit(d, alpha, LogBase::E).unwrap();
    // I(X:Y|Z) = H(X,Z) + H(Y,Z) - H(X,Y,Z) - H(Z) for unit-covariance blocks
    h(1 + k) + h(k + l) - h(1 + k + l) - h(k)
}
