//! Flat `key = value` configuration files.
//!
//! Lines hold one `key = value` pair; `#` starts a comment and blank lines are
//! ignored. Keys are dotted (`estimator.alpha_grid`). Lists are comma
//! separated, and a numeric list item may be a range `start:stop:step`
//! (inclusive of `stop`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use renyite_core::dynamics::RosslerParams;
use renyite_core::{DuplicatePolicy, EstimatorConfig, LagSpec, LogBase, SurrogateKind, SurrogatePlan};

use crate::error::{CliError, Result};

pub const DESK_PRESET: &str = include_str!("../presets/desk.cfg");
pub const PAPER_PRESET: &str = include_str!("../presets/paper.cfg");

pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "desk" => Some(DESK_PRESET),
        "paper" => Some(PAPER_PRESET),
        _ => None,
    }
}

/// Raw key/value pairs, each with the line it was read from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, (usize, String)>,
    origin: String,
}

impl ConfigMap {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::Parse { path: origin.to_string(), line: i + 1, message };
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty()
                || !key.split('.').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
            {
                return Err(err(format!("invalid key `{key}`")));
            }
            if entries.insert(key.to_string(), (i + 1, value.trim().to_string())).is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { entries, origin: origin.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Later assignments in `other` win.
    pub fn merge(mut self, other: ConfigMap) -> Self {
        self.entries.extend(other.entries);
        self.origin = other.origin;
        self
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), (0, value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn error(&self, key: &str, message: String) -> CliError {
        match self.entries.get(key) {
            Some((line, _)) if *line > 0 => CliError::Parse { path: self.origin.clone(), line: *line, message },
            _ => CliError::Config(message),
        }
    }

    fn value<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| self.error(key, format!("`{key}`: cannot parse `{v}`: {e}"))),
        }
    }

    fn grid(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => parse_grid(v).map_err(|m| self.error(key, format!("`{key}`: {m}"))),
        }
    }
}

fn round_grid(v: f64) -> f64 {
    // Snap to 12 significant digits so `0:0.3:0.01` yields 0.07 rather than 0.07000000000000001.
    format!("{v:.12e}").parse().unwrap()
}

/// Parses a comma separated list of numbers and inclusive ranges, returning
/// the sorted, deduplicated grid.
pub fn parse_grid(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0) || b < a {
                    return Err(format!("range `{item}` needs start <= stop and a positive step"));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| round_grid(a + i as f64 * step)));
            }
            _ => return Err(format!("`{item}` is neither a number nor start:stop:step")),
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err("grid values must be finite".into());
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    if out.is_empty() {
        return Err("grid is empty".into());
    }
    Ok(out)
}

/// Components of the six-dimensional Rossler state, `x1..x3` (master) then
/// `y1..y3` (slave).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Components(Vec<usize>);

impl Components {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl FromStr for Components {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut idx = Vec::new();
        for part in s.split('+').map(str::trim) {
            let (base, rest) = match part.as_bytes().first() {
                Some(b'x') => (0, &part[1..]),
                Some(b'y') => (3, &part[1..]),
                _ => return Err(format!("unknown component `{part}`")),
            };
            match rest {
                "" => idx.extend(base..base + 3),
                "1" | "2" | "3" => idx.push(base + rest.parse::<usize>().unwrap() - 1),
                _ => return Err(format!("unknown component `{part}`")),
            }
        }
        let before = idx.len();
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != before {
            return Err(format!("repeated component in `{s}`"));
        }
        Ok(Components(idx))
    }
}

impl fmt::Display for Components {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == [0, 1, 2] {
            return f.write_str("x");
        }
        if self.0 == [3, 4, 5] {
            return f.write_str("y");
        }
        let names: Vec<String> =
            self.0.iter().map(|&i| format!("{}{}", if i < 3 { 'x' } else { 'y' }, i % 3 + 1)).collect();
        f.write_str(&names.join("+"))
    }
}

/// Information flow from `source` to `target`, written `source->target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub source: Components,
    pub target: Components,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (source, target) = s.split_once("->").ok_or_else(|| format!("direction `{s}` must read source->target"))?;
        Ok(Direction { source: source.parse()?, target: target.parse()? })
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantityKind {
    Rte,
    RteEffective,
    Balance,
    BalanceEffective,
}

impl QuantityKind {
    pub fn name(self) -> &'static str {
        match self {
            QuantityKind::Rte => "rte",
            QuantityKind::RteEffective => "rte_effective",
            QuantityKind::Balance => "balance",
            QuantityKind::BalanceEffective => "balance_effective",
        }
    }

    pub fn uses_surrogates(self) -> bool {
        matches!(self, QuantityKind::RteEffective | QuantityKind::BalanceEffective)
    }
}

impl FromStr for QuantityKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rte" => Ok(QuantityKind::Rte),
            "rte_effective" => Ok(QuantityKind::RteEffective),
            "balance" => Ok(QuantityKind::Balance),
            "balance_effective" => Ok(QuantityKind::BalanceEffective),
            _ => Err(format!("unknown quantity `{s}` (rte, rte_effective, balance, balance_effective)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub epsilon_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    /// Named lag specs; quantity columns read `<kind>.<name>`.
    pub lag_specs: Vec<(String, LagSpec)>,
    pub quantities: Vec<QuantityKind>,
    pub directions: Vec<Direction>,
    pub series_length: usize,
    pub dt: f64,
    pub t_transient: f64,
    pub estimator: EstimatorConfig,
    pub surrogate: SurrogatePlan,
    pub rossler: RosslerParams,
}

const KNOWN_KEYS: &[&str] = &[
    "series.length",
    "series.dt",
    "series.transient",
    "sweep.epsilon_grid",
    "sweep.quantities",
    "sweep.directions",
    "estimator.alpha_grid",
    "estimator.n_min",
    "estimator.n_max",
    "estimator.log_base",
    "estimator.duplicates",
    "surrogate.kind",
    "surrogate.count",
    "surrogate.seed",
    "rossler.a",
    "rossler.b",
    "rossler.c",
    "rossler.omega1",
    "rossler.omega2",
    "rossler.epsilon",
    "rossler.coupling",
    "validate.length",
    "validate.seed",
];

fn default_epsilon_grid() -> Vec<f64> {
    parse_grid("0:0.3:0.01, 0.1:0.15:0.001").unwrap()
}

fn list<T: FromStr<Err = String>>(map: &ConfigMap, key: &str, default: &str) -> Result<Vec<T>> {
    let text = map.get(key).unwrap_or(default);
    let items: Vec<T> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|m| map.error(key, format!("`{key}`: {m}"))))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(map.error(key, format!("`{key}` is empty")));
    }
    Ok(items)
}

fn parse_log_base(text: &str) -> std::result::Result<LogBase, String> {
    match text {
        "e" => Ok(LogBase::E),
        "2" => Ok(LogBase::TWO),
        other => {
            let b: f64 = other.parse().map_err(|_| format!("`{other}` is not a logarithm base"))?;
            LogBase::new(b).map_err(|e| e.to_string())
        }
    }
}

impl SweepConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        for key in map.keys() {
            if !KNOWN_KEYS.contains(&key) && !key.starts_with("lags.") {
                return Err(map.error(key, format!("unknown key `{key}`")));
            }
        }

        let mut lag_specs = Vec::new();
        for key in map.keys().filter(|k| k.starts_with("lags.")) {
            let name = &key["lags.".len()..];
            if name.contains('.') {
                return Err(map.error(key, format!("lag name `{name}` must not contain dots")));
            }
            let spec: LagSpec =
                map.get(key).unwrap().parse().map_err(|e: renyite_core::Error| map.error(key, e.to_string()))?;
            lag_specs.push((name.to_string(), spec));
        }
        if lag_specs.is_empty() {
            lag_specs.push(("short".to_string(), LagSpec::new(vec![0, 1], 1, vec![0]).unwrap()));
        }

        let log_base = match map.get("estimator.log_base") {
            None => LogBase::E,
            Some(v) => parse_log_base(v).map_err(|m| map.error("estimator.log_base", m))?,
        };
        let duplicates = match map.get("estimator.duplicates").unwrap_or("error") {
            "error" => DuplicatePolicy::Error,
            "jitter" => DuplicatePolicy::Jitter,
            other => return Err(map.error("estimator.duplicates", format!("unknown duplicate policy `{other}`"))),
        };
        let estimator = EstimatorConfig {
            alpha: 1.0,
            n_min: map.value("estimator.n_min", 5)?,
            n_max: map.value("estimator.n_max", 50)?,
            log_base,
            duplicates,
        };
        let kind: SurrogateKind = map.value("surrogate.kind", SurrogateKind::Shuffle)?;
        let surrogate =
            SurrogatePlan { kind, count: map.value("surrogate.count", 19)?, seed: map.value("surrogate.seed", 0)? };

        let d = RosslerParams::default();
        let rossler = RosslerParams {
            a: map.value("rossler.a", d.a)?,
            b: map.value("rossler.b", d.b)?,
            c: map.value("rossler.c", d.c)?,
            omega1: map.value("rossler.omega1", d.omega1)?,
            omega2: map.value("rossler.omega2", d.omega2)?,
            epsilon: map.value("rossler.epsilon", 0.0)?,
            coupling: map.value("rossler.coupling", d.coupling)?,
            ..d
        };

        let cfg = SweepConfig {
            epsilon_grid: map.grid("sweep.epsilon_grid", &default_epsilon_grid())?,
            alpha_grid: map.grid("estimator.alpha_grid", &[0.6, 0.8, 1.0, 1.2, 1.5, 2.0])?,
            lag_specs,
            quantities: list(map, "sweep.quantities", "rte_effective")?,
            directions: list(map, "sweep.directions", "x1->y1, y1->x1")?,
            series_length: map.value("series.length", 100_000)?,
            dt: map.value("series.dt", 0.1)?,
            t_transient: map.value("series.transient", 1000.0)?,
            estimator,
            surrogate,
            rossler,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(&ConfigMap::parse(text, "<config>")?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.epsilon_grid.is_empty() || self.alpha_grid.is_empty() {
            return fail("grids must not be empty".into());
        }
        for (name, g) in [("epsilon", &self.epsilon_grid), ("alpha", &self.alpha_grid)] {
            if g.windows(2).any(|w| w[0] >= w[1]) {
                return fail(format!("{name} grid must be strictly increasing"));
            }
        }
        if self.epsilon_grid[0] < 0.0 {
            return fail("coupling values must be >= 0".into());
        }
        let estimator_error = |e: renyite_core::Error| CliError::Config(format!("estimator: {e}"));
        self.estimator.validate().map_err(estimator_error)?;
        for &alpha in &self.alpha_grid {
            EstimatorConfig { alpha, ..self.estimator }.validate().map_err(estimator_error)?;
        }
        let max_lag = self.lag_specs.iter().map(|(_, s)| s.max_lag() + s.future_step()).max().unwrap_or(0);
        if self.series_length <= 10 * (max_lag + self.estimator.n_max) {
            return fail(format!(
                "series.length = {} must exceed 10 * (max lag + n_max) = {}",
                self.series_length,
                10 * (max_lag + self.estimator.n_max)
            ));
        }
        if !(self.dt > 0.0) || !(self.t_transient >= 0.0) {
            return fail("series.dt must be positive and series.transient non-negative".into());
        }
        if self.quantities.iter().any(|q| q.uses_surrogates()) && self.surrogate.count == 0 {
            return fail("effective quantities need surrogate.count >= 1".into());
        }
        Ok(())
    }

    /// Simulated time span holding `series_length` samples.
    pub fn t_window(&self) -> f64 {
        self.series_length as f64 * self.dt
    }

    pub fn unit(&self) -> String {
        unit_name(self.estimator.log_base)
    }
}

pub fn unit_name(base: LogBase) -> String {
    if base == LogBase::E {
        "nats".into()
    } else if base == LogBase::TWO {
        "bits".into()
    } else {
        format!("log{} units", base.base())
    }
}
