//! Gamma-family special functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// zeta(k) - 1 for k = 2..=10; higher orders are summed directly.
const ZETA_MINUS_ONE: [f64; 9] = [
    PI * PI / 6.0 - 1.0,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
];

fn zeta_minus_one(k: usize) -> f64 {
    if k <= 10 {
        return ZETA_MINUS_ONE[k - 2];
    }
    // n^-k < 1e-17 relative beyond n = 48 for k >= 11.
    (2..=48).rev().map(|n| (n as f64).powi(-(k as i32))).sum()
}

/// `ln Γ(1 + z)` for `|z| <= 0.5`.
///
/// Uses the expansion `-ln(1+z) + z(1-γ) + Σ (-1)^k (ζ(k)-1) z^k / k`, whose
/// terms shrink like `(z/2)^k`.
fn ln_gamma_1p(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = z;
    for k in 2..=40 {
        zk *= -z;
        let term = zeta_minus_one(k) * zk / k as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    // zk carries (-1)^(k+1) z^k; flip the accumulated sign.
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) - sum
}

/// Stirling correction `Σ B_2k / (2k (2k-1) x^(2k-1))`, accurate for x >= 15.
fn stirling_tail(x: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_1p(x) - x.ln();
    }
    if x < 1.5 {
        return ln_gamma_1p(x - 1.0);
    }
    if x < 2.5 {
        return (x - 1.0).ln() + ln_gamma_1p(x - 2.0);
    }
    if x >= 15.0 {
        return (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x);
    }
    // Shift into the Stirling range: lnΓ(x) = lnΓ(x + n) - ln(x (x+1) ... (x+n-1)).
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < 15.0 {
        prod *= shifted;
        shifted += 1.0;
    }
    (shifted - 0.5) * shifted.ln() - shifted + HALF_LN_2PI + stirling_tail(shifted) - prod.ln()
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn gamma_ln(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_ln requires a positive finite argument, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// `ln Γ(x + a) - ln Γ(x)` without the cancellation of two large log-gammas.
///
/// Both `x` and `x + a` must be positive.
pub fn gamma_ln_ratio(x: f64, a: f64) -> Result<f64> {
    let y = x + a;
    if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !a.is_finite() {
        return Err(Error::Domain(format!("gamma_ln_ratio requires x > 0 and x + a > 0, got x = {x}, a = {a}")));
    }
    if x.min(y) < 20.0 {
        return Ok(ln_gamma_unchecked(y) - ln_gamma_unchecked(x));
    }
    Ok((x - 0.5) * (a / x).ln_1p() + a * y.ln() - a + (stirling_tail(y) - stirling_tail(x)))
}

/// Digamma `ψ(x) = Γ'(x) / Γ(x)` in the standard sign convention.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires a positive finite argument, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // -Σ B_2k / (2k x^2k)
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

/// Natural log of the volume of the Euclidean unit ball in `m` dimensions.
pub fn ln_unit_ball_volume(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("unit ball volume needs dimension >= 1".into()));
    }
    let half = m as f64 / 2.0;
    Ok(half * PI.ln() - ln_gamma_unchecked(half + 1.0))
}

/// Volume of the Euclidean unit ball, `π^(m/2) / Γ(m/2 + 1)`.
pub fn unit_ball_volume(m: usize) -> Result<f64> {
    ln_unit_ball_volume(m).map(f64::exp)
}
