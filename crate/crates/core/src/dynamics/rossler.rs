use std::collections::VecDeque;

use super::ode::{DenseStep, Dopri5, Tolerances};
use crate::error::{Error, Result};

/// Slave variable that the drive `epsilon * (x1 - y_i)` compares with `x1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Coupling {
    /// `epsilon * (x1 - y2)`.
    #[default]
    CrossY2,
    /// `epsilon * (x1 - y1)`, diffusive coupling of the first variables.
    Diffusive,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Coupling::CrossY2 => "x1-y2",
            Coupling::Diffusive => "x1-y1",
        }
    }

    /// Index (0-based, within the slave) of the compared slave variable.
    pub fn slave_index(self) -> usize {
        match self {
            Coupling::CrossY2 => 1,
            Coupling::Diffusive => 0,
        }
    }
}

impl std::str::FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x1-y2" => Ok(Coupling::CrossY2),
            "x1-y1" => Ok(Coupling::Diffusive),
            other => Err(Error::Argument(format!("unknown coupling `{other}` (x1-y2 or x1-y1)"))),
        }
    }
}

/// Parameters of the master/slave Rossler pair; the slave is driven through
/// `epsilon * (x1 - y_i)` in its first equation, with `y_i` set by `coupling`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosslerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub epsilon: f64,
    pub coupling: Coupling,
    pub x0: [f64; 3],
    pub y0: [f64; 3],
}

impl Default for RosslerParams {
    fn default() -> Self {
        Self {
            a: 0.15,
            b: 0.2,
            c: 10.0,
            omega1: 1.015,
            omega2: 0.985,
            epsilon: 0.0,
            coupling: Coupling::CrossY2,
            x0: [0.0; 3],
            y0: [0.0, 0.0, 1.0],
        }
    }
}

impl RosslerParams {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon, ..Self::default() }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let all = [self.a, self.b, self.c, self.omega1, self.omega2, self.epsilon];
        if all.iter().chain(&self.x0).chain(&self.y0).any(|v| !v.is_finite()) {
            return Err(Error::Domain("Rossler parameters must be finite".into()));
        }
        if self.epsilon < 0.0 {
            return Err(Error::Domain(format!("coupling must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn master_rhs(x: &[f64], p: &RosslerParams, dx: &mut [f64]) {
    dx[0] = -p.omega1 * x[1] - x[2];
    dx[1] = p.omega1 * x[0] + p.a * x[1];
    dx[2] = p.b + x[2] * (x[0] - p.c);
}

#[inline]
pub(crate) fn slave_rhs(y: &[f64], x1: f64, p: &RosslerParams, dy: &mut [f64]) {
    dy[0] = -p.omega2 * y[1] - y[2] + p.epsilon * (x1 - y[p.coupling.slave_index()]);
    dy[1] = p.omega2 * y[0] + p.a * y[1];
    dy[2] = p.b + y[2] * (y[0] - p.c);
}

/// Right-hand side of the six-dimensional system `(x1, x2, x3, y1, y2, y3)`.
pub fn rossler_rhs(state: &[f64; 6], params: &RosslerParams) -> [f64; 6] {
    let mut out = [0.0; 6];
    let (master, slave) = out.split_at_mut(3);
    master_rhs(&state[..3], params, master);
    slave_rhs(&state[3..], state[0], params, slave);
    out
}

/// Uniformly sampled orbit of the coupled pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub t0: f64,
    pub states: Vec<[f64; 6]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// One state component (0..3 master, 3..6 slave) as a series.
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.states.iter().flat_map(|s| s.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Accepted master steps that still cover times the slave may ask about.
struct DriveWindow {
    steps: VecDeque<DenseStep>,
}

impl DriveWindow {
    fn covered_until(&self) -> f64 {
        self.steps.back().map_or(f64::NEG_INFINITY, DenseStep::t1)
    }

    fn x1_at(&self, t: f64) -> f64 {
        let idx = self.steps.partition_point(|s| s.t1() < t).min(self.steps.len() - 1);
        self.steps[idx].component(0, t)
    }

    fn drop_before(&mut self, t: f64) {
        while self.steps.len() > 1 && self.steps[0].t1() < t {
            self.steps.pop_front();
        }
    }
}

fn sample_times(t_transient: f64, t_window: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_window > 0.0) || !(t_transient >= 0.0) {
        return Err(Error::Argument(format!(
            "need dt > 0, t_window > 0, t_transient >= 0 (got {dt}, {t_window}, {t_transient})"
        )));
    }
    let count = (t_window / dt).round() as usize;
    if count == 0 {
        return Err(Error::Argument("sampling window shorter than one interval".into()));
    }
    Ok(count)
}

fn check_finite(values: &[f64], t: f64) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { time: t, reason: "non-finite state".into() })
    }
}

/// Integrates the coupled pair, discards `t_transient` and keeps
/// `round(t_window / dt)` samples spaced by `dt` via dense output.
///
/// The master is stepped by its own error controller and the slave reads
/// `x1(t)` from the master's dense output, so the master orbit is bitwise
/// independent of `epsilon` and `y0`.
pub fn integrate_coupled(params: &RosslerParams, t_transient: f64, t_window: f64, dt: f64) -> Result<Trajectory> {
    integrate_coupled_with(params, t_transient, t_window, dt, Tolerances::default())
}

pub fn integrate_coupled_with(
    params: &RosslerParams,
    t_transient: f64,
    t_window: f64,
    dt: f64,
    tol: Tolerances,
) -> Result<Trajectory> {
    params.validate()?;
    let count = sample_times(t_transient, t_window, dt)?;
    let t_end = t_transient + (count - 1) as f64 * dt;
    let p = *params;

    let mut master = Dopri5::new(0.0, &params.x0, tol);
    let mut slave = Dopri5::new(0.0, &params.y0, tol);
    let mut master_rhs_fn = |_t: f64, x: &[f64], dx: &mut [f64]| master_rhs(x, &p, dx);
    let mut drive = DriveWindow { steps: VecDeque::new() };

    let mut states = vec![[0.0; 6]; count];
    let mut next_master = 0usize;
    let mut next_slave = 0usize;
    let sample_t = |i: usize| t_transient + i as f64 * dt;

    // Samples at t = 0 precede any step.
    if t_end == 0.0 {
        states[0][..3].copy_from_slice(&params.x0);
        states[0][3..].copy_from_slice(&params.y0);
        return Ok(Trajectory { dt, t0: t_transient, states });
    }
    if t_transient == 0.0 {
        states[0][..3].copy_from_slice(&params.x0);
        states[0][3..].copy_from_slice(&params.y0);
        next_master = 1;
        next_slave = 1;
    }

    let mut advance_master =
        |master: &mut Dopri5, drive: &mut DriveWindow, states: &mut [[f64; 6]], next: &mut usize| {
            master.step(&mut master_rhs_fn, t_end)?;
            check_finite(master.y(), master.t())?;
            let step = master.dense().clone();
            while *next < count && sample_t(*next) <= step.t1() {
                let t = sample_t(*next);
                let mut x = [0.0; 3];
                step.eval(t, &mut x);
                states[*next][..3].copy_from_slice(&x);
                *next += 1;
            }
            drive.steps.push_back(step);
            Ok::<(), Error>(())
        };

    while slave.t() < t_end {
        let wanted = if slave.proposed_step() > 0.0 {
            (slave.t() + slave.proposed_step()).min(t_end)
        } else {
            // The first slave step size is still unknown; cover a generous span.
            (slave.t() + 1.0).min(t_end)
        };
        while drive.covered_until() < wanted {
            advance_master(&mut master, &mut drive, &mut states, &mut next_master)?;
        }
        let limit = drive.covered_until().min(t_end);
        let window = &drive;
        let mut slave_fn = |t: f64, y: &[f64], dy: &mut [f64]| slave_rhs(y, window.x1_at(t), &p, dy);
        slave.step(&mut slave_fn, limit)?;
        check_finite(slave.y(), slave.t())?;
        let step = slave.dense();
        while next_slave < count && sample_t(next_slave) <= step.t1() {
            let t = sample_t(next_slave);
            let mut y = [0.0; 3];
            step.eval(t, &mut y);
            states[next_slave][3..].copy_from_slice(&y);
            next_slave += 1;
        }
        drive.drop_before(slave.t());
    }
    while next_master < count {
        advance_master(&mut master, &mut drive, &mut states, &mut next_master)?;
    }
    Ok(Trajectory { dt, t0: t_transient, states })
}

/// Integrates the master system on its own and samples it like
/// [`integrate_coupled`].
pub fn integrate_master(params: &RosslerParams, t_transient: f64, t_window: f64, dt: f64) -> Result<Vec<[f64; 3]>> {
    params.validate()?;
    let count = sample_times(t_transient, t_window, dt)?;
    let t_end = t_transient + (count - 1) as f64 * dt;
    let p = *params;
    let mut f = |_t: f64, x: &[f64], dx: &mut [f64]| master_rhs(x, &p, dx);
    let mut stepper = Dopri5::new(0.0, &params.x0, Tolerances::default());
    let mut out = Vec::with_capacity(count);
    if t_transient == 0.0 {
        out.push(params.x0);
    }
    while out.len() < count {
        stepper.step(&mut f, t_end)?;
        check_finite(stepper.y(), stepper.t())?;
        let step = stepper.dense();
        while out.len() < count && t_transient + out.len() as f64 * dt <= step.t1() {
            let mut x = [0.0; 3];
            step.eval(t_transient + out.len() as f64 * dt, &mut x);
            out.push(x);
        }
    }
    Ok(out)
}
