//! Dormand-Prince 5(4) with PI step-size control and 4th-order dense output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const MAX_GROWTH: f64 = 10.0;
const MAX_SHRINK: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: 1e-9, abs: 1e-12 }
    }
}

/// Polynomial that interpolates the solution over one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    coeffs: [Vec<f64>; 5],
}

impl DenseStep {
    fn new(n: usize) -> Self {
        Self { t0: 0.0, h: 0.0, coeffs: std::array::from_fn(|_| vec![0.0; n]) }
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated component `i` at time `t` inside the step.
    #[inline]
    pub fn component(&self, i: usize, t: f64) -> f64 {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])))
    }

    pub fn eval(&self, t: f64, out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.component(i, t);
        }
    }
}

/// Adaptive explicit integrator state. The right-hand side is passed to every
/// call so that callers can feed externally driven inputs.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    t: f64,
    y: Vec<f64>,
    h: f64,
    tol: Tolerances,
    h_max: f64,
    fac_old: f64,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    fsal_ready: bool,
    last_rejected: bool,
    dense: DenseStep,
    steps: u64,
}

impl Dopri5 {
    pub fn new(t0: f64, y0: &[f64], tol: Tolerances) -> Self {
        let n = y0.len();
        Self {
            t: t0,
            y: y0.to_vec(),
            h: 0.0,
            tol,
            h_max: f64::INFINITY,
            fac_old: 1e-4,
            k: std::array::from_fn(|_| vec![0.0; n]),
            y_stage: vec![0.0; n],
            y_new: vec![0.0; n],
            fsal_ready: false,
            last_rejected: false,
            dense: DenseStep::new(n),
            steps: 0,
        }
    }

    pub fn with_max_step(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Step size the next attempt will use (0 before the first step).
    pub fn proposed_step(&self) -> f64 {
        self.h
    }

    pub fn accepted_steps(&self) -> u64 {
        self.steps
    }

    /// Interpolant of the most recent accepted step.
    pub fn dense(&self) -> &DenseStep {
        &self.dense
    }

    /// Replaces the state at the current time (invalidates the cached slope).
    pub fn set_state(&mut self, y: &[f64]) {
        self.y.copy_from_slice(y);
        self.fsal_ready = false;
    }

    fn initial_step<F: FnMut(f64, &[f64], &mut [f64])>(&mut self, f: &mut F) -> f64 {
        // Hairer & Wanner's starting-step heuristic.
        let n = self.y.len() as f64;
        let scale = |y: f64| self.tol.abs + self.tol.rel * y.abs();
        let d0 = (self.y.iter().map(|&y| (y / scale(y)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (self.y.iter().zip(&self.k[0]).map(|(&y, &k)| (k / scale(y)).powi(2)).sum::<f64>() / n).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.h_max);
        for (ys, (&y, &k)) in self.y_stage.iter_mut().zip(self.y.iter().zip(&self.k[0])) {
            *ys = y + h0 * k;
        }
        f(self.t + h0, &self.y_stage, &mut self.k[1]);
        let d2 = (self
            .y
            .iter()
            .zip(self.k[1].iter().zip(&self.k[0]))
            .map(|(&y, (&k1, &k0))| ((k1 - k0) / scale(y)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(self.h_max)
    }

    /// Advances by one accepted step that never passes `t_limit`.
    pub fn step<F: FnMut(f64, &[f64], &mut [f64])>(&mut self, f: &mut F, t_limit: f64) -> Result<()> {
        let n = self.y.len();
        if !self.fsal_ready {
            f(self.t, &self.y, &mut self.k[0]);
            self.fsal_ready = true;
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(f);
        }
        loop {
            let remaining = t_limit - self.t;
            if remaining <= 0.0 {
                return Err(Error::Argument(format!("step limit {t_limit} is not ahead of t = {}", self.t)));
            }
            let proposal = self.h.min(self.h_max);
            let mut h = proposal;
            let hits_limit = h >= remaining;
            if hits_limit {
                h = remaining;
            }
            if h < 1e-13 * self.t.abs().max(1.0) {
                return Err(Error::Divergence { time: self.t, reason: format!("step size underflow (h = {h:e})") });
            }
            self.stages(f, h);
            let err = self.error_norm(h);
            if !err.is_finite() {
                // Blow-up inside the step: shrink hard and retry.
                self.h = h / MAX_SHRINK;
                self.last_rejected = true;
                if self.h < 1e-13 * self.t.abs().max(1.0) {
                    return Err(Error::Divergence { time: self.t, reason: "non-finite state".into() });
                }
                continue;
            }
            let fac11 = err.powf(EXPO);
            if err <= 1.0 {
                let mut fac = fac11 / self.fac_old.powf(BETA);
                fac = (fac / SAFETY).clamp(1.0 / MAX_GROWTH, MAX_SHRINK);
                let mut h_new = h / fac;
                if self.last_rejected {
                    h_new = h_new.min(h);
                }
                self.fac_old = err.max(1e-4);
                self.last_rejected = false;
                self.finish_step(h, n);
                // A step clipped to the limit says little about the next one.
                self.h = if hits_limit { h_new.max(proposal) } else { h_new };
                self.steps += 1;
                return Ok(());
            }
            self.h = h / (fac11 / SAFETY).min(MAX_SHRINK);
            self.last_rejected = true;
        }
    }

    fn stages<F: FnMut(f64, &[f64], &mut [f64])>(&mut self, f: &mut F, h: f64) {
        let t = self.t;
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let y = &self.y;
        let ys = &mut self.y_stage;
        for i in 0..y.len() {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, ys, k2);
        for i in 0..y.len() {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, ys, k3);
        for i in 0..y.len() {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, ys, k4);
        for i in 0..y.len() {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, ys, k5);
        for i in 0..y.len() {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, ys, k6);
        let yn = &mut self.y_new;
        for i in 0..y.len() {
            yn[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, yn, k7);
    }

    fn error_norm(&mut self, h: f64) -> f64 {
        let [k1, _, k3, k4, k5, k6, k7] = &self.k;
        let n = self.y.len();
        let mut acc = 0.0;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = self.tol.abs + self.tol.rel * self.y[i].abs().max(self.y_new[i].abs());
            acc += (e / sk) * (e / sk);
        }
        if self.y_new.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        (acc / n as f64).sqrt()
    }

    fn finish_step(&mut self, h: f64, n: usize) {
        let [k1, _, k3, k4, k5, k6, k7] = &self.k;
        let [r1, r2, r3, r4, r5] = &mut self.dense.coeffs;
        for i in 0..n {
            let ydiff = self.y_new[i] - self.y[i];
            let bspl = h * k1[i] - ydiff;
            r1[i] = self.y[i];
            r2[i] = ydiff;
            r3[i] = bspl;
            r4[i] = ydiff - h * k7[i] - bspl;
            r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        self.dense.t0 = self.t;
        self.dense.h = h;
        self.t += h;
        std::mem::swap(&mut self.y, &mut self.y_new);
        // First-same-as-last: k7 is the slope at the new point.
        self.k.swap(0, 6);
    }
}
