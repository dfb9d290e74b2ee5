use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::estimator::LogBase;

/// A zero-mean Gaussian described by its covariance matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    covariance: Vec<f64>,
    dim: usize,
    ln_det: f64,
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::Domain(format!("covariance is not positive definite (pivot {i} = {s})")));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ x = b` in place.
fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * b[k]).sum();
        b[i] = (b[i] - s) / l[i * n + i];
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * b[k]).sum();
        b[i] = (b[i] - s) / l[i * n + i];
    }
}

impl GaussianModel {
    /// Checks symmetry (to 1e-12 relative) and positive definiteness.
    pub fn new(covariance: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || covariance.len() != dim * dim {
            return Err(Error::Argument(format!("{} entries do not form a {dim}x{dim} matrix", covariance.len())));
        }
        if covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("covariance has non-finite entries".into()));
        }
        let scale = covariance.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (covariance[i * dim + j] - covariance[j * dim + i]).abs() > 1e-12 * scale {
                    return Err(Error::Domain(format!("covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        let l = cholesky(&covariance, dim)?;
        let ln_det = 2.0 * (0..dim).map(|i| l[i * dim + i].ln()).sum::<f64>();
        Ok(Self { covariance, dim, ln_det })
    }

    pub fn diagonal(variances: &[f64]) -> Result<Self> {
        let d = variances.len();
        let mut c = vec![0.0; d * d];
        for (i, v) in variances.iter().enumerate() {
            c[i * d + i] = *v;
        }
        Self::new(c, d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn covariance(&self) -> &[f64] {
        &self.covariance
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * self.dim + j]
    }

    pub fn ln_det(&self) -> f64 {
        self.ln_det
    }

    fn sub(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        rows.iter().flat_map(|&i| cols.iter().map(move |&j| self.get(i, j))).collect()
    }
}

/// Covariance of the `x` block conditioned on the `y` block,
/// `Σ_xx - Σ_xy Σ_yy⁻¹ Σ_yx`.
pub fn partial_covariance(model: &GaussianModel, x: &[usize], y: &[usize]) -> Result<GaussianModel> {
    let d = model.dim();
    let all: Vec<usize> = x.iter().chain(y).copied().collect();
    let mut seen = vec![false; d];
    for &i in &all {
        if i >= d || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Argument(format!("index sets must be disjoint and below {d}")));
        }
    }
    if x.is_empty() {
        return Err(Error::Argument("conditioned block is empty".into()));
    }
    let (nx, ny) = (x.len(), y.len());
    let mut out = model.sub(x, x);
    if ny > 0 {
        let l = cholesky(&model.sub(y, y), ny)?;
        let xy = model.sub(x, y);
        for j in 0..nx {
            let mut col: Vec<f64> = (0..ny).map(|k| xy[j * ny + k]).collect();
            cholesky_solve(&l, ny, &mut col);
            for i in 0..nx {
                out[i * nx + j] -= (0..ny).map(|k| xy[i * ny + k] * col[k]).sum::<f64>();
            }
        }
        // Symmetrise away rounding.
        for i in 0..nx {
            for j in 0..i {
                let m = 0.5 * (out[i * nx + j] + out[j * nx + i]);
                out[i * nx + j] = m;
                out[j * nx + i] = m;
            }
        }
    }
    GaussianModel::new(out, nx)
}

/// Renyi entropy of order α of a Gaussian:
/// `½ ln|Σ| + (D/2) ln(2π α^{1/(α-1)})`, with the Shannon limit `e` at α = 1.
pub fn gaussian_renyi_entropy(model: &GaussianModel, alpha: f64, log_base: LogBase) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be positive and finite, got {alpha}")));
    }
    let ln_factor = if (alpha - 1.0).abs() < 1e-12 { E.ln() } else { alpha.ln() / (alpha - 1.0) };
    let d = model.dim() as f64;
    Ok(log_base.from_nats(0.5 * model.ln_det() + 0.5 * d * ((2.0 * PI).ln() + ln_factor)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let unit = GaussianModel::diagonal(&[1.0]).unwrap();
        let h1 = gaussian_renyi_entropy(&unit, 1.0, LogBase::E).unwrap();
        assert!((h1 - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-14);
        let h2 = gaussian_renyi_entropy(&unit, 2.0, LogBase::E).unwrap();
        assert!((h2 - 1.265_512_123_484_645_4).abs() < 1e-14);
        let m = GaussianModel::diagonal(&[4.0, 9.0]).unwrap();
        let h = gaussian_renyi_entropy(&m, 2.0, LogBase::E).unwrap();
        assert!((h - (2.0 * h2 + 0.5 * 36f64.ln())).abs() < 1e-13);
        let bits = gaussian_renyi_entropy(&unit, 2.0, LogBase::TWO).unwrap();
        assert!((bits - h2 / 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn partial_covariance_of_a_correlated_pair() {
        let m = GaussianModel::new(vec![1.0, 0.8, 0.8, 1.0], 2).unwrap();
        let p = partial_covariance(&m, &[0], &[1]).unwrap();
        assert!((p.get(0, 0) - 0.36).abs() < 1e-15);
        assert!(partial_covariance(&m, &[0], &[0]).is_err());
        assert!(partial_covariance(&m, &[], &[1]).is_err());
    }

    #[test]
    fn rejects_bad_covariances() {
        assert!(GaussianModel::new(vec![1.0, 2.0, 2.0, 1.0], 2).is_err());
        assert!(GaussianModel::new(vec![1.0, 0.1, 0.2, 1.0], 2).is_err());
        assert!(GaussianModel::new(vec![1.0; 3], 2).is_err());
        let m = GaussianModel::diagonal(&[1.0]).unwrap();
        assert!(gaussian_renyi_entropy(&m, 0.0, LogBase::E).is_err());
    }
}
