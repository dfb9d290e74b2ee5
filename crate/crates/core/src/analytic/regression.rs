use crate::error::{Error, Result};
use crate::estimator::LogBase;

/// Ordinary least-squares fit of a scalar response.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    /// One coefficient per regressor column, in input order.
    pub coefficients: Vec<f64>,
    /// Zero when the fit was made without an intercept.
    pub intercept: f64,
    /// Residual sum of squares divided by the number of observations.
    pub residual_variance: f64,
    pub observations: usize,
}

/// Least squares through a Householder QR factorisation of the design matrix.
///
/// A column whose diagonal entry of `R` falls below `1e-10` times its original
/// norm is reported as rank deficient (index counts the intercept first when
/// present).
pub fn least_squares(columns: &[Vec<f64>], y: &[f64], intercept: bool) -> Result<RegressionFit> {
    let n = y.len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Argument("regressor columns and response differ in length".into()));
    }
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(columns.len() + 1);
    if intercept {
        a.push(vec![1.0; n]);
    }
    a.extend(columns.iter().cloned());
    let p = a.len();
    if p == 0 || n <= p {
        return Err(Error::Argument(format!("{n} observations cannot determine {p} parameters")));
    }
    if a.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain("design matrix or response is not finite".into()));
    }

    let norms: Vec<f64> = a.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let mut qty = y.to_vec();
    let mut r_diag = vec![0.0; p];
    for j in 0..p {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-10 * norms[j]) {
            return Err(Error::RankDeficient { column: j });
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored over a[j][j..]
        a[j][j] -= alpha;
        let vnorm2: f64 = a[j][j..].iter().map(|v| v * v).sum();
        r_diag[j] = alpha;
        let (head, tail) = a.split_at_mut(j + 1);
        let v = &head[j][j..];
        for col in tail.iter_mut() {
            let dot: f64 = v.iter().zip(&col[j..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col[j..].iter_mut().zip(v) {
                *c -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&qty[j..]).map(|(a, b)| a * b).sum();
        let f = 2.0 * dot / vnorm2;
        for (c, vi) in qty[j..].iter_mut().zip(v) {
            *c -= f * vi;
        }
    }
    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let s: f64 = (j + 1..p).map(|k| a[k][j] * beta[k]).sum();
        beta[j] = (qty[j] - s) / r_diag[j];
    }
    let rss: f64 = qty[p..].iter().map(|v| v * v).sum();
    let (intercept_value, coefficients) = if intercept { (beta[0], beta[1..].to_vec()) } else { (0.0, beta) };
    Ok(RegressionFit { coefficients, intercept: intercept_value, residual_variance: rss / n as f64, observations: n })
}

fn lagged(series: &[f64], lag: usize, start: usize) -> Vec<f64> {
    series[start - lag..series.len() - lag].to_vec()
}

/// Granger causality `F = ln(σ²_reduced / σ²_full)` from `source` to `target`.
///
/// The full model regresses `x_t` on an intercept, `x_{t-1..t-k}` and
/// `y_{t-1..t-l}`; the reduced model drops the source lags. Both use the same
/// rows `t = max(k, l)..N`.
pub fn granger_f(target: &[f64], source: &[f64], k: usize, l: usize, log_base: LogBase) -> Result<f64> {
    if target.len() != source.len() {
        return Err(Error::Argument("target and source differ in length".into()));
    }
    if k == 0 || l == 0 {
        return Err(Error::Argument("Granger model needs k >= 1 and l >= 1".into()));
    }
    let start = k.max(l);
    if target.len() <= start + k + l + 2 {
        return Err(Error::Argument(format!("series of length {} too short for k = {k}, l = {l}", target.len())));
    }
    let y = target[start..].to_vec();
    let own: Vec<Vec<f64>> = (1..=k).map(|lag| lagged(target, lag, start)).collect();
    let mut full = own.clone();
    full.extend((1..=l).map(|lag| lagged(source, lag, start)));
    let reduced_fit = least_squares(&own, &y, true)?;
    let full_fit = least_squares(&full, &y, true)?;
    Ok(log_base.from_nats((reduced_fit.residual_variance / full_fit.residual_variance).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let z: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64).collect();
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 3.0 - 2.0 * a + 0.25 * b).collect();
        let fit = least_squares(&[x, z], &y, true).unwrap();
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!((fit.coefficients[0] + 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 0.25).abs() < 1e-12);
        assert!(fit.residual_variance < 1e-24);
    }

    #[test]
    fn matches_normal_equations_on_a_small_problem() {
        // y = b x fitted without intercept: b = Σxy / Σx²
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y = vec![1.1, 1.9, 3.2, 3.9];
        let fit = least_squares(std::slice::from_ref(&x), &y, false).unwrap();
        let b = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|a| a * a).sum::<f64>();
        assert!((fit.coefficients[0] - b).abs() < 1e-14);
        let rss: f64 = x.iter().zip(&y).map(|(a, c)| (c - b * a).powi(2)).sum();
        assert!((fit.residual_variance - rss / 4.0).abs() < 1e-14);
    }

    #[test]
    fn collinear_columns_are_rejected() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let y = x.clone();
        assert_eq!(least_squares(&[x, twice], &y, true), Err(Error::RankDeficient { column: 2 }));
        let constant = vec![1.0; 10];
        assert!(matches!(least_squares(&[constant], &y, true), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn short_series_are_rejected() {
        assert!(granger_f(&[1.0; 5], &[1.0; 5], 1, 1, LogBase::E).is_err());
        assert!(granger_f(&[1.0; 50], &[1.0; 49], 1, 1, LogBase::E).is_err());
        assert!(granger_f(&[1.0; 50], &[1.0; 50], 0, 1, LogBase::E).is_err());
    }
}
