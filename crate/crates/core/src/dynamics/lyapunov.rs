//! Lyapunov spectra by tangent-space integration with periodic Gram-Schmidt
//! (QR) reorthonormalisation.
//!
//! Three tangent frames ride along the orbit: the full six-dimensional frame,
//! a three-dimensional frame for the master alone and a three-dimensional
//! frame for the slave's conditional exponents (slave Jacobian block only).

use super::ode::{Dopri5, Tolerances};
use super::rossler::{master_rhs, slave_rhs, RosslerParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovConfig {
    pub t_transient: f64,
    pub t_total: f64,
    pub renorm_interval: f64,
    pub tol: Tolerances,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self { t_transient: 1000.0, t_total: 50_000.0, renorm_interval: 0.5, tol: Tolerances { rel: 1e-8, abs: 1e-10 } }
    }
}

/// Exponents in nats per time unit, each list sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSpectrum {
    pub exponents: [f64; 6],
    pub master: [f64; 3],
    pub slave_conditional: [f64; 3],
}

const BASE: usize = 6;
const FULL: usize = BASE;
const MASTER: usize = FULL + 36;
const SLAVE: usize = MASTER + 9;
const DIM: usize = SLAVE + 9;

fn tangent_rhs(z: &[f64], p: &RosslerParams, dz: &mut [f64]) {
    let (x, y) = (&z[0..3], &z[3..6]);
    master_rhs(x, p, &mut dz[0..3]);
    slave_rhs(y, x[0], p, &mut dz[3..6]);

    let jm = [[0.0, -p.omega1, -1.0], [p.omega1, p.a, 0.0], [x[2], 0.0, x[0] - p.c]];
    let mut js = [[0.0, -p.omega2, -1.0], [p.omega2, p.a, 0.0], [y[2], 0.0, y[0] - p.c]];
    js[0][p.coupling.slave_index()] -= p.epsilon;
    let mul3 = |j: &[[f64; 3]; 3], v: &[f64], out: &mut [f64]| {
        for r in 0..3 {
            out[r] = j[r][0] * v[0] + j[r][1] * v[1] + j[r][2] * v[2];
        }
    };

    for k in 0..6 {
        let v = &z[FULL + 6 * k..FULL + 6 * k + 6];
        let out = &mut dz[FULL + 6 * k..FULL + 6 * k + 6];
        let mut top = [0.0; 3];
        let mut bottom = [0.0; 3];
        mul3(&jm, &v[0..3], &mut top);
        mul3(&js, &v[3..6], &mut bottom);
        // Coupling block: d(ẏ1)/d(x1) = ε.
        bottom[0] += p.epsilon * v[0];
        out[..3].copy_from_slice(&top);
        out[3..].copy_from_slice(&bottom);
    }
    for k in 0..3 {
        let (src, dst) = (MASTER + 3 * k, MASTER + 3 * k);
        let v = [z[src], z[src + 1], z[src + 2]];
        mul3(&jm, &v, &mut dz[dst..dst + 3]);
        let (src, dst) = (SLAVE + 3 * k, SLAVE + 3 * k);
        let v = [z[src], z[src + 1], z[src + 2]];
        mul3(&js, &v, &mut dz[dst..dst + 3]);
    }
}

/// Modified Gram-Schmidt over `count` column vectors of length `len` stored
/// contiguously; adds `ln R_kk` to `log_growth` and returns false on collapse.
fn reorthonormalize(frame: &mut [f64], len: usize, count: usize, log_growth: &mut [f64]) -> bool {
    for k in 0..count {
        for j in 0..k {
            let dot: f64 = (0..len).map(|i| frame[k * len + i] * frame[j * len + i]).sum();
            for i in 0..len {
                frame[k * len + i] -= dot * frame[j * len + i];
            }
        }
        let norm = (0..len).map(|i| frame[k * len + i].powi(2)).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return false;
        }
        for i in 0..len {
            frame[k * len + i] /= norm;
        }
        log_growth[k] += norm.ln();
    }
    true
}

fn identity_frame(frame: &mut [f64], len: usize) {
    frame.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..len {
        frame[k * len + k] = 1.0;
    }
}

fn sorted_desc<const N: usize>(mut v: [f64; N]) -> [f64; N] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Lyapunov spectrum of the coupled pair averaged over `t_total - t_transient`.
pub fn lyapunov_spectrum(
    params: &RosslerParams,
    t_transient: f64,
    t_total: f64,
    renorm_interval: f64,
) -> Result<LyapunovSpectrum> {
    lyapunov_spectrum_with(
        params,
        &LyapunovConfig { t_transient, t_total, renorm_interval, ..LyapunovConfig::default() },
    )
}

pub fn lyapunov_spectrum_with(params: &RosslerParams, cfg: &LyapunovConfig) -> Result<LyapunovSpectrum> {
    params.validate()?;
    if !(cfg.renorm_interval > 0.0) || !(cfg.t_transient >= 0.0) || !(cfg.t_total > cfg.t_transient) {
        return Err(Error::Argument(format!(
            "need renorm_interval > 0 and t_total > t_transient >= 0 (got {}, {}, {})",
            cfg.renorm_interval, cfg.t_total, cfg.t_transient
        )));
    }
    let p = *params;
    let mut z = vec![0.0; DIM];
    z[..3].copy_from_slice(&params.x0);
    z[3..6].copy_from_slice(&params.y0);
    identity_frame(&mut z[FULL..MASTER], 6);
    identity_frame(&mut z[MASTER..SLAVE], 3);
    identity_frame(&mut z[SLAVE..DIM], 3);

    let mut f = |_t: f64, z: &[f64], dz: &mut [f64]| tangent_rhs(z, &p, dz);
    let mut stepper = Dopri5::new(0.0, &z, cfg.tol).with_max_step(cfg.renorm_interval);

    let mut full = [0.0; 6];
    let mut master = [0.0; 3];
    let mut slave = [0.0; 3];
    let mut discard = [0.0; 6];
    let mut boundary = 0usize;
    let mut accumulated = 0.0;
    loop {
        boundary += 1;
        let t_prev = stepper.t();
        let t_next = (boundary as f64 * cfg.renorm_interval).min(cfg.t_total);
        while stepper.t() < t_next {
            stepper.step(&mut f, t_next)?;
        }
        z.copy_from_slice(stepper.y());
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: stepper.t(), reason: "non-finite tangent state".into() });
        }
        // Growth is only counted over intervals lying wholly past the transient.
        let measuring = t_prev >= cfg.t_transient;
        let ok = if measuring {
            accumulated += t_next - t_prev;
            reorthonormalize(&mut z[FULL..MASTER], 6, 6, &mut full)
                && reorthonormalize(&mut z[MASTER..SLAVE], 3, 3, &mut master)
                && reorthonormalize(&mut z[SLAVE..DIM], 3, 3, &mut slave)
        } else {
            reorthonormalize(&mut z[FULL..MASTER], 6, 6, &mut discard)
                && reorthonormalize(&mut z[MASTER..SLAVE], 3, 3, &mut discard[..3])
                && reorthonormalize(&mut z[SLAVE..DIM], 3, 3, &mut discard[..3])
        };
        if !ok {
            return Err(Error::Divergence { time: stepper.t(), reason: "tangent frame collapsed".into() });
        }
        stepper.set_state(&z);
        if t_next >= cfg.t_total {
            break;
        }
    }
    let scale = |v: f64| v / accumulated;
    Ok(LyapunovSpectrum {
        exponents: sorted_desc(full.map(scale)),
        master: sorted_desc(master.map(scale)),
        slave_conditional: sorted_desc(slave.map(scale)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fixed-step RK4 Benettin run on the master alone with a finite-difference
    /// Jacobian, sharing no code with the tangent integrator above.
    fn standalone_largest(p: &RosslerParams, t_transient: f64, t_total: f64) -> f64 {
        let f = |s: [f64; 3]| [-p.omega1 * s[1] - s[2], p.omega1 * s[0] + p.a * s[1], p.b + s[2] * (s[0] - p.c)];
        let rk4 = |s: [f64; 3], h: f64| {
            let add = |a: [f64; 3], b: [f64; 3], c: f64| [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]];
            let k1 = f(s);
            let k2 = f(add(s, k1, h / 2.0));
            let k3 = f(add(s, k2, h / 2.0));
            let k4 = f(add(s, k3, h));
            [0, 1, 2].map(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        };
        let h = 0.002;
        let d0 = 1e-8;
        let mut x = p.x0;
        let mut y = [x[0] + d0, x[1], x[2]];
        let mut sum = 0.0;
        let steps_per_renorm = 250;
        let mut t = 0.0;
        while t < t_total {
            for _ in 0..steps_per_renorm {
                x = rk4(x, h);
                y = rk4(y, h);
            }
            t += h * steps_per_renorm as f64;
            let d = ((0..3).map(|i| (y[i] - x[i]).powi(2)).sum::<f64>()).sqrt();
            if t > t_transient {
                sum += (d / d0).ln();
            }
            y = [0, 1, 2].map(|i| x[i] + (y[i] - x[i]) * d0 / d);
        }
        sum / (t_total - t_transient)
    }

    #[test]
    fn master_largest_matches_standalone_oracle() {
        let p = RosslerParams::with_epsilon(0.0);
        let s = lyapunov_spectrum(&p, 500.0, 8000.0, 0.5).unwrap();
        let oracle = standalone_largest(&p, 500.0, 8000.0);
        assert!((s.master[0] - oracle).abs() < 0.15 * oracle, "{} vs {}", s.master[0], oracle);
    }

    #[test]
    fn flow_direction_gives_a_zero_exponent() {
        for eps in [0.0, 0.1] {
            let s = lyapunov_spectrum(&RosslerParams::with_epsilon(eps), 500.0, 5000.0, 0.5).unwrap();
            assert!(s.master[1].abs() < 0.005, "{:?}", s.master);
            assert!(s.exponents.iter().any(|l| l.abs() < 0.005));
            assert!(s.exponents.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn uncoupled_full_spectrum_is_the_union_of_subsystems() {
        let s = lyapunov_spectrum(&RosslerParams::default(), 500.0, 5000.0, 0.5).unwrap();
        let mut union: Vec<f64> = s.master.iter().chain(&s.slave_conditional).copied().collect();
        union.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in s.exponents.iter().zip(&union) {
            assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "{:?} vs {:?}", s.exponents, union);
        }
    }

    #[test]
    fn rejects_bad_windows() {
        let p = RosslerParams::default();
        assert!(lyapunov_spectrum(&p, 100.0, 50.0, 0.5).is_err());
        assert!(lyapunov_spectrum(&p, 0.0, 50.0, 0.0).is_err());
    }
}
