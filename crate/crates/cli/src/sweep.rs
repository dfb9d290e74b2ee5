//! Coupling sweeps over the Rossler pair.
//!
//! Each coupling value is integrated once; every (quantity, lag spec,
//! direction) group then evaluates all missing orders on that trajectory.
//! Surrogate seeds are derived from the cell label, so results do not depend
//! on scheduling or on which cells a resumed run still has to compute.

use std::collections::HashSet;
use std::sync::mpsc;

use rayon::prelude::*;
use renyite_core::dynamics::{integrate_coupled, RosslerParams, Trajectory};
use renyite_core::infoflow::{rte_alphas, rte_balance_alphas, rte_balance_effective_alphas, rte_effective_alphas};
use renyite_core::seed::derive_seed_from_label;
use renyite_core::{LagSpec, MultiSeries, SurrogatePlan, TransferResult};

use crate::config::{Components, Direction, QuantityKind, SweepConfig};

/// One (epsilon, alpha, quantity, direction) cell. Failed cells carry NaN
/// value and std and `n_effective = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub alpha: f64,
    pub quantity: String,
    pub direction: String,
    pub value: f64,
    pub std: f64,
    pub n_effective: usize,
    pub seed: u64,
}

impl SweepRow {
    pub fn is_failure(&self) -> bool {
        self.value.is_nan()
    }

    fn key(&self) -> CellKey {
        (self.quantity.clone(), self.direction.clone(), self.epsilon.to_bits(), self.alpha.to_bits())
    }
}

type CellKey = (String, String, u64, u64);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Sorts rows by (quantity, direction, epsilon, alpha).
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.quantity
                .cmp(&b.quantity)
                .then_with(|| a.direction.cmp(&b.direction))
                .then_with(|| a.epsilon.total_cmp(&b.epsilon))
                .then_with(|| a.alpha.total_cmp(&b.alpha))
        });
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_failure()).count()
    }

    /// Distinct quantity names in sorted order.
    pub fn quantities(&self) -> Vec<String> {
        let mut q: Vec<String> = self.rows.iter().map(|r| r.quantity.clone()).collect();
        q.sort();
        q.dedup();
        q
    }

    pub fn directions(&self, quantity: &str) -> Vec<String> {
        let mut d: Vec<String> =
            self.rows.iter().filter(|r| r.quantity == quantity).map(|r| r.direction.clone()).collect();
        d.sort();
        d.dedup();
        d
    }

    pub fn find(&self, quantity: &str, direction: &str, epsilon: f64, alpha: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.quantity == quantity && r.direction == direction && r.epsilon == epsilon && r.alpha == alpha)
    }

    /// Rows of one quantity and direction.
    pub fn select(&self, quantity: &str, direction: &str) -> SweepResult {
        SweepResult {
            rows: self.rows.iter().filter(|r| r.quantity == quantity && r.direction == direction).cloned().collect(),
        }
    }
}

pub fn quantity_name(kind: QuantityKind, lag_name: &str) -> String {
    format!("{}.{}", kind.name(), lag_name)
}

struct Group<'a> {
    kind: QuantityKind,
    quantity: String,
    spec: &'a LagSpec,
    direction: &'a Direction,
    alphas: Vec<f64>,
}

fn groups<'a>(cfg: &'a SweepConfig, epsilon: f64, done: &HashSet<CellKey>) -> Vec<Group<'a>> {
    let mut out = Vec::new();
    for &kind in &cfg.quantities {
        for (lag_name, spec) in &cfg.lag_specs {
            let quantity = quantity_name(kind, lag_name);
            for direction in &cfg.directions {
                let dir = direction.to_string();
                let alphas: Vec<f64> = cfg
                    .alpha_grid
                    .iter()
                    .copied()
                    .filter(|a| !done.contains(&(quantity.clone(), dir.clone(), epsilon.to_bits(), a.to_bits())))
                    .collect();
                if !alphas.is_empty() {
                    out.push(Group { kind, quantity: quantity.clone(), spec, direction, alphas });
                }
            }
        }
    }
    out
}

fn series(traj: &Trajectory, comps: &Components) -> renyite_core::Result<MultiSeries> {
    let channels: Vec<Vec<f64>> = comps.indices().iter().map(|&i| traj.component(i)).collect();
    let refs: Vec<&[f64]> = channels.iter().map(Vec::as_slice).collect();
    MultiSeries::from_channels(&refs)
}

fn evaluate(cfg: &SweepConfig, traj: &Trajectory, g: &Group, seed: u64) -> renyite_core::Result<Vec<TransferResult>> {
    let target = series(traj, &g.direction.target)?;
    let source = series(traj, &g.direction.source)?;
    let plan = SurrogatePlan { seed, ..cfg.surrogate };
    let est = &cfg.estimator;
    match g.kind {
        QuantityKind::Rte => rte_alphas(&target, &source, g.spec, est, &g.alphas),
        QuantityKind::RteEffective => rte_effective_alphas(&target, &source, g.spec, est, &plan, &g.alphas),
        QuantityKind::Balance => rte_balance_alphas(&target, &source, g.spec, est, &g.alphas),
        QuantityKind::BalanceEffective => rte_balance_effective_alphas(&target, &source, g.spec, est, &plan, &g.alphas),
    }
}

fn failure_rows(epsilon: f64, g: &Group, seed: u64) -> Vec<SweepRow> {
    g.alphas
        .iter()
        .map(|&alpha| SweepRow {
            epsilon,
            alpha,
            quantity: g.quantity.clone(),
            direction: g.direction.to_string(),
            value: f64::NAN,
            std: f64::NAN,
            n_effective: 0,
            seed,
        })
        .collect()
}

/// Seed of every cell in the group `(quantity, direction, epsilon)`; all
/// orders share it.
pub fn cell_seed(master: u64, quantity: &str, direction: &str, epsilon: f64) -> u64 {
    derive_seed_from_label(master, &format!("{quantity}|{direction}|{epsilon}"))
}

/// Integrates one coupling value and evaluates its missing cells. Failures
/// are returned as marker rows together with their messages.
fn run_epsilon(cfg: &SweepConfig, epsilon: f64, done: &HashSet<CellKey>) -> (Vec<SweepRow>, Vec<String>) {
    let groups = groups(cfg, epsilon, done);
    if groups.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let seeds: Vec<u64> = groups
        .iter()
        .map(|g| {
            if g.kind.uses_surrogates() {
                cell_seed(cfg.surrogate.seed, &g.quantity, &g.direction.to_string(), epsilon)
            } else {
                0
            }
        })
        .collect();
    let params = RosslerParams { epsilon, ..cfg.rossler };
    let traj = match integrate_coupled(&params, cfg.t_transient, cfg.t_window(), cfg.dt) {
        Ok(t) => t,
        Err(e) => {
            let rows = groups.iter().zip(&seeds).flat_map(|(g, &s)| failure_rows(epsilon, g, s)).collect();
            return (rows, vec![format!("epsilon = {epsilon}: {e}")]);
        }
    };

    let outcomes: Vec<(Vec<SweepRow>, Option<String>)> = groups
        .par_iter()
        .zip(&seeds)
        .map(|(g, &seed)| match evaluate(cfg, &traj, g, seed) {
            Ok(results) => {
                let rows = results
                    .iter()
                    .map(|r| SweepRow {
                        epsilon,
                        alpha: r.alpha,
                        quantity: g.quantity.clone(),
                        direction: g.direction.to_string(),
                        value: r.value,
                        std: r.std,
                        n_effective: r.n_effective,
                        seed,
                    })
                    .collect();
                (rows, None)
            }
            Err(e) => (
                failure_rows(epsilon, g, seed),
                Some(format!("epsilon = {epsilon}, {} {}: {e}", g.quantity, g.direction)),
            ),
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (r, e) in outcomes {
        rows.extend(r);
        errors.extend(e);
    }
    (rows, errors)
}

/// Progress report handed to the collector after each coupling value.
pub struct Progress<'a> {
    pub epsilon: f64,
    pub result: &'a SweepResult,
    pub errors: &'a [String],
}

/// Runs the sweep, keeping every successful row of `existing` and computing
/// only the cells it lacks. `collect` runs on the calling thread after each
/// coupling value with the rows gathered so far, sorted.
pub fn run_sweep_resuming<F>(cfg: &SweepConfig, existing: SweepResult, mut collect: F) -> SweepResult
where
    F: FnMut(Progress<'_>),
{
    let mut result = SweepResult { rows: existing.rows.into_iter().filter(|r| !r.is_failure()).collect() };
    let done: HashSet<CellKey> = result.rows.iter().map(SweepRow::key).collect();
    result.sort();

    let (tx, rx) = mpsc::channel::<(f64, Vec<SweepRow>, Vec<String>)>();
    std::thread::scope(|scope| {
        let done = &done;
        scope.spawn(move || {
            cfg.epsilon_grid.par_iter().for_each_with(tx, |tx, &eps| {
                let (rows, errors) = run_epsilon(cfg, eps, done);
                // The receiver only goes away once every sender is dropped.
                tx.send((eps, rows, errors)).unwrap();
            });
        });
        for (epsilon, rows, errors) in rx {
            result.rows.extend(rows);
            result.sort();
            collect(Progress { epsilon, result: &result, errors: &errors });
        }
    });
    result
}

pub fn run_sweep(cfg: &SweepConfig) -> SweepResult {
    run_sweep_resuming(cfg, SweepResult::default(), |_| {})
}
