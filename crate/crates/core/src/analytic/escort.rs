use crate::error::{Error, Result};

/// Escort distribution `ρ_i = p_i^α / Σ_j p_j^α`.
///
/// Powers are formed relative to the largest entry to avoid underflow, and
/// zero entries stay zero for every α (including α = 0).
pub fn escort_distribution(p: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("escort order must be finite and >= 0, got {alpha}")));
    }
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Domain("probabilities must be finite and non-negative".into()));
    }
    let total: f64 = p.iter().sum();
    if total == 0.0 {
        return Err(Error::Domain("all probabilities are zero".into()));
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
    }
    let ln_max = p.iter().fold(0.0f64, |m, &v| m.max(v)).ln();
    let w: Vec<f64> = p.iter().map(|&v| if v == 0.0 { 0.0 } else { (alpha * (v.ln() - ln_max)).exp() }).collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / z).collect())
}
