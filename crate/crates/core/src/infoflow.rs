//! Delay embeddings and Renyi transfer entropy.
//!
//! For target `X`, source `Y` and a [`LagSpec`] with target lags `{k}`,
//! future step `m` and source lags `{l}`, the transfer entropy from `Y` to `X` is
//!
//! ```text
//! T = H(X_{n+m} | X_n^{k}) - H(X_{n+m} | X_n^{k}, Y_n^{l})
//!   = [H(F,P) - H(P)] - [H(F,P,S) - H(P,S)]
//! ```
//!
//! with `F` the future value, `P` the target past and `S` the source past. The
//! four entropies are evaluated rank by rank and subtracted before the rank
//! ensemble is formed. Values may be negative for α ≠ 1.
//!
//! Lag `λ` refers to the value at time `n - λ`, so lag 0 is the value at the
//! anchor time `n`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{EntropyEstimate, EstimatorConfig, IndexedCloud};
use crate::numkernel::PointCloud;
use crate::seed::derive_seed;
use crate::surrogate::SurrogateKind;

/// Lag sets of one transfer-entropy evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LagSpec {
    target_lags: Vec<usize>,
    future_step: usize,
    source_lags: Vec<usize>,
}

fn normalized_lags(mut lags: Vec<usize>, what: &str) -> Result<Vec<usize>> {
    if lags.is_empty() {
        return Err(Error::Argument(format!("{what} lags must not be empty")));
    }
    lags.sort_unstable();
    let before = lags.len();
    lags.dedup();
    if lags.len() != before {
        return Err(Error::Argument(format!("{what} lags contain duplicates")));
    }
    Ok(lags)
}

impl LagSpec {
    /// Lag sets are sorted; duplicates or empty sets are rejected.
    pub fn new(target_lags: Vec<usize>, future_step: usize, source_lags: Vec<usize>) -> Result<Self> {
        if future_step == 0 {
            return Err(Error::Argument("future step must be at least 1".into()));
        }
        Ok(Self {
            target_lags: normalized_lags(target_lags, "target")?,
            future_step,
            source_lags: normalized_lags(source_lags, "source")?,
        })
    }

    pub fn target_lags(&self) -> &[usize] {
        &self.target_lags
    }

    pub fn future_step(&self) -> usize {
        self.future_step
    }

    pub fn source_lags(&self) -> &[usize] {
        &self.source_lags
    }

    pub fn max_lag(&self) -> usize {
        let t = *self.target_lags.last().unwrap();
        let s = *self.source_lags.last().unwrap();
        t.max(s)
    }

    /// Number of embedding vectors for a series of length `len`.
    pub fn n_effective(&self, len: usize) -> usize {
        len.saturating_sub(self.max_lag() + self.future_step)
    }
}

impl std::fmt::Display for LagSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}},{},{{{}}}", join(&self.target_lags), self.future_step, join(&self.source_lags))
    }
}

/// Parses the `Display` form, e.g. `{0,1},1,{0}`. Whitespace is ignored.
impl std::str::FromStr for LagSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Argument(format!("malformed lag spec `{s}` (expected e.g. {{0,1}},1,{{0}})"));
        let set = |text: &str| -> Result<Vec<usize>> {
            let inner = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')).ok_or_else(bad)?;
            inner.split(',').map(|v| v.parse::<usize>().map_err(|_| bad())).collect()
        };
        let (target, rest) = compact.split_once("},").ok_or_else(bad)?;
        let (step, source) = rest.split_once(',').ok_or_else(bad)?;
        LagSpec::new(set(&format!("{target}}}"))?, step.parse().map_err(|_| bad())?, set(source)?)
    }
}

/// A (possibly multichannel) time series stored row-major: `len` samples of
/// `channels` values each.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeries {
    data: Vec<f64>,
    channels: usize,
}

impl MultiSeries {
    pub fn from_rows(data: Vec<f64>, channels: usize) -> Result<Self> {
        if channels == 0 || data.is_empty() || data.len() % channels != 0 {
            return Err(Error::Argument(format!("{} values do not form rows of {channels} channels", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("series contains non-finite values".into()));
        }
        Ok(Self { data, channels })
    }

    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::from_rows(values.to_vec(), 1)
    }

    /// Interleaves equally long channels.
    pub fn from_channels(channels: &[&[f64]]) -> Result<Self> {
        let len = channels.first().map_or(0, |c| c.len());
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::Argument("channels differ in length".into()));
        }
        let data = (0..len).flat_map(|t| channels.iter().map(move |c| c[t])).collect();
        Self::from_rows(data, channels.len())
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.channels..(t + 1) * self.channels]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    fn with_data(&self, data: Vec<f64>) -> Self {
        Self { data, channels: self.channels }
    }
}

/// The four aligned clouds of a delay embedding; row `i` of each belongs to
/// anchor time `n = max_lag + i`.
#[derive(Debug, Clone)]
pub struct EmbeddedClouds {
    pub future_past: PointCloud,
    pub past: PointCloud,
    pub full: PointCloud,
    pub past_source: PointCloud,
}

fn check_lengths(target: &MultiSeries, source: &MultiSeries, spec: &LagSpec) -> Result<usize> {
    if target.len() != source.len() {
        return Err(Error::Argument(format!("target has {} samples, source {}", target.len(), source.len())));
    }
    let n_eff = spec.n_effective(target.len());
    if n_eff < 2 {
        return Err(Error::Argument(format!(
            "series of length {} too short for lags {spec} (need more than {})",
            target.len(),
            spec.max_lag() + spec.future_step() + 1
        )));
    }
    Ok(n_eff)
}

/// Rows of `[future?, target past, source past?]` for every anchor time.
fn embed_rows(
    target: &MultiSeries,
    source: Option<&MultiSeries>,
    spec: &LagSpec,
    with_future: bool,
) -> Result<PointCloud> {
    let n_eff = spec.n_effective(target.len());
    let start = spec.max_lag();
    let ct = target.channels();
    let cs = source.map_or(0, |s| s.channels());
    let dim = usize::from(with_future) * ct
        + spec.target_lags().len() * ct
        + source.map_or(0, |_| spec.source_lags().len() * cs);
    let mut coords = Vec::with_capacity(n_eff * dim);
    for n in start..start + n_eff {
        if with_future {
            coords.extend_from_slice(target.row(n + spec.future_step()));
        }
        for &k in spec.target_lags() {
            coords.extend_from_slice(target.row(n - k));
        }
        if let Some(s) = source {
            for &l in spec.source_lags() {
                coords.extend_from_slice(s.row(n - l));
            }
        }
    }
    PointCloud::from_flat(coords, dim)
}

/// Delay embedding of scalar series into the four clouds.
pub fn delay_embed(target: &[f64], source: &[f64], spec: &LagSpec) -> Result<EmbeddedClouds> {
    delay_embed_multi(&MultiSeries::scalar(target)?, &MultiSeries::scalar(source)?, spec)
}

pub fn delay_embed_multi(target: &MultiSeries, source: &MultiSeries, spec: &LagSpec) -> Result<EmbeddedClouds> {
    check_lengths(target, source, spec)?;
    Ok(EmbeddedClouds {
        future_past: embed_rows(target, None, spec, true)?,
        past: embed_rows(target, None, spec, false)?,
        full: embed_rows(target, Some(source), spec, true)?,
        past_source: embed_rows(target, Some(source), spec, false)?,
    })
}

/// A transfer-entropy value with its rank-ensemble spread, in the configured
/// log base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferResult {
    pub alpha: f64,
    pub value: f64,
    pub std: f64,
    pub n_effective: usize,
}

impl TransferResult {
    /// `self - other` with the spreads combined in quadrature.
    pub fn difference(&self, other: &TransferResult) -> TransferResult {
        TransferResult {
            alpha: self.alpha,
            value: self.value - other.value,
            std: self.std.hypot(other.std),
            n_effective: self.n_effective,
        }
    }
}

/// Surrogate settings for the effective variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurrogatePlan {
    pub kind: SurrogateKind,
    pub count: usize,
    pub seed: u64,
}

impl Default for SurrogatePlan {
    fn default() -> Self {
        Self { kind: SurrogateKind::Shuffle, count: 19, seed: 0 }
    }
}

fn alpha_configs(cfg: &EstimatorConfig, alphas: &[f64]) -> Result<Vec<EstimatorConfig>> {
    if alphas.is_empty() {
        return Err(Error::Argument("no alpha values requested".into()));
    }
    alphas
        .iter()
        .map(|&alpha| {
            let c = EstimatorConfig { alpha, ..*cfg };
            c.validate()?;
            Ok(c)
        })
        .collect()
}

struct TargetPart {
    future_past: IndexedCloud,
    past: IndexedCloud,
}

struct SourcePart {
    full: IndexedCloud,
    past_source: IndexedCloud,
}

fn target_part(target: &MultiSeries, spec: &LagSpec, cfg: &EstimatorConfig) -> Result<TargetPart> {
    Ok(TargetPart {
        future_past: IndexedCloud::new(embed_rows(target, None, spec, true)?, cfg.n_max, cfg.duplicates)?,
        past: IndexedCloud::new(embed_rows(target, None, spec, false)?, cfg.n_max, cfg.duplicates)?,
    })
}

fn source_part(
    target: &MultiSeries,
    source: &MultiSeries,
    spec: &LagSpec,
    cfg: &EstimatorConfig,
) -> Result<SourcePart> {
    Ok(SourcePart {
        full: IndexedCloud::new(embed_rows(target, Some(source), spec, true)?, cfg.n_max, cfg.duplicates)?,
        past_source: IndexedCloud::new(embed_rows(target, Some(source), spec, false)?, cfg.n_max, cfg.duplicates)?,
    })
}

/// Per-rank transfer entropy in nats for every configured order.
fn per_rank_flows(t: &TargetPart, s: &SourcePart, cfgs: &[EstimatorConfig]) -> Result<Vec<Vec<f64>>> {
    cfgs.iter()
        .map(|c| {
            let fp = t.future_past.per_rank_nats(c.alpha, c.n_min, c.n_max)?;
            let p = t.past.per_rank_nats(c.alpha, c.n_min, c.n_max)?;
            let full = s.full.per_rank_nats(c.alpha, c.n_min, c.n_max)?;
            let ps = s.past_source.per_rank_nats(c.alpha, c.n_min, c.n_max)?;
            Ok((0..fp.len()).map(|i| (fp[i] - p[i]) - (full[i] - ps[i])).collect())
        })
        .collect()
}

fn prepare(target: &MultiSeries, source: &MultiSeries, spec: &LagSpec, cfg: &EstimatorConfig) -> Result<usize> {
    cfg.validate()?;
    let n_eff = check_lengths(target, source, spec)?;
    if n_eff <= cfg.n_max {
        return Err(Error::Argument(format!("{n_eff} embedding vectors cannot support neighbour rank {}", cfg.n_max)));
    }
    Ok(n_eff)
}

fn ensemble(cfg: &EstimatorConfig, nats: &[f64]) -> EntropyEstimate {
    EntropyEstimate::from_per_rank((cfg.n_min..=cfg.n_max).zip(nats.iter().copied()).collect())
}

fn to_result(cfg: &EstimatorConfig, value_nats: f64, std_nats: f64, n_effective: usize) -> TransferResult {
    TransferResult {
        alpha: cfg.alpha,
        value: cfg.log_base.from_nats(value_nats),
        std: cfg.log_base.from_nats(std_nats).abs(),
        n_effective,
    }
}

/// Transfer entropy from `source` to `target` for several orders, sharing
/// neighbour tables across them. `cfg.alpha` is ignored in favour of `alphas`.
pub fn rte_alphas(
    target: &MultiSeries,
    source: &MultiSeries,
    spec: &LagSpec,
    cfg: &EstimatorConfig,
    alphas: &[f64],
) -> Result<Vec<TransferResult>> {
    let cfgs = alpha_configs(cfg, alphas)?;
    let n_eff = prepare(target, source, spec, &cfgs[0])?;
    let t = target_part(target, spec, cfg)?;
    let s = source_part(target, source, spec, cfg)?;
    let flows = per_rank_flows(&t, &s, &cfgs)?;
    Ok(cfgs
        .iter()
        .zip(&flows)
        .map(|(c, f)| {
            let e = ensemble(c, f);
            to_result(c, e.mean, e.std, n_eff)
        })
        .collect())
}

/// Effective transfer entropy: raw value minus the mean over surrogates of the
/// source. Replica `j` uses seed `derive_seed(plan.seed, j)`. The spread is the
/// raw rank spread and the spread of the surrogate mean combined in quadrature.
pub fn rte_effective_alphas(
    target: &MultiSeries,
    source: &MultiSeries,
    spec: &LagSpec,
    cfg: &EstimatorConfig,
    plan: &SurrogatePlan,
    alphas: &[f64],
) -> Result<Vec<TransferResult>> {
    if plan.count == 0 {
        return Err(Error::Argument("at least one surrogate is required".into()));
    }
    let cfgs = alpha_configs(cfg, alphas)?;
    let n_eff = prepare(target, source, spec, &cfgs[0])?;
    let t = target_part(target, spec, cfg)?;
    let raw = per_rank_flows(&t, &source_part(target, source, spec, cfg)?, &cfgs)?;

    let replicas: Vec<Vec<Vec<f64>>> = (0..plan.count)
        .into_par_iter()
        .map(|j| {
            let seed = derive_seed(plan.seed, j as u64);
            let shuffled = source.with_data(plan.kind.apply(source.as_flat(), source.channels(), seed)?);
            per_rank_flows(&t, &source_part(target, &shuffled, spec, cfg)?, &cfgs)
        })
        .collect::<Result<_>>()?;

    Ok(cfgs
        .iter()
        .enumerate()
        .map(|(a, c)| {
            let ranks = raw[a].len();
            let mut avg = vec![0.0; ranks];
            for replica in &replicas {
                for (acc, v) in avg.iter_mut().zip(&replica[a]) {
                    *acc += v;
                }
            }
            avg.iter_mut().for_each(|v| *v /= plan.count as f64);
            let r = ensemble(c, &raw[a]);
            let s = ensemble(c, &avg);
            to_result(c, r.mean - s.mean, r.std.hypot(s.std), n_eff)
        })
        .collect())
}

/// `T(source → target) - T(target → source)` for several orders.
pub fn rte_balance_alphas(
    target: &MultiSeries,
    source: &MultiSeries,
    spec: &LagSpec,
    cfg: &EstimatorConfig,
    alphas: &[f64],
) -> Result<Vec<TransferResult>> {
    let forward = rte_alphas(target, source, spec, cfg, alphas)?;
    let reverse = rte_alphas(source, target, spec, cfg, alphas)?;
    Ok(forward.iter().zip(&reverse).map(|(f, r)| f.difference(r)).collect())
}

/// Effective forward minus effective reverse transfer entropy; both directions
/// use the same surrogate seeds.
pub fn rte_balance_effective_alphas(
    target: &MultiSeries,
    source: &MultiSeries,
    spec: &LagSpec,
    cfg: &EstimatorConfig,
    plan: &SurrogatePlan,
    alphas: &[f64],
) -> Result<Vec<TransferResult>> {
    let forward = rte_effective_alphas(target, source, spec, cfg, plan, alphas)?;
    let reverse = rte_effective_alphas(source, target, spec, cfg, plan, alphas)?;
    Ok(forward.iter().zip(&reverse).map(|(f, r)| f.difference(r)).collect())
}

fn single(results: Result<Vec<TransferResult>>) -> Result<TransferResult> {
    Ok(results?[0])
}

/// Renyi transfer entropy from `source` to `target` at `cfg.alpha`.
pub fn rte(target: &[f64], source: &[f64], spec: &LagSpec, cfg: &EstimatorConfig) -> Result<TransferResult> {
    single(rte_alphas(&MultiSeries::scalar(target)?, &MultiSeries::scalar(source)?, spec, cfg, &[cfg.alpha]))
}

/// Balance `T(source → target) - T(target → source)`.
pub fn rte_balance(target: &[f64], source: &[f64], spec: &LagSpec, cfg: &EstimatorConfig) -> Result<TransferResult> {
    single(rte_balance_alphas(&MultiSeries::scalar(target)?, &MultiSeries::scalar(source)?, spec, cfg, &[cfg.alpha]))
}

pub fn rte_effective(
    target: &[f64],
    source: &[f64],
    spec: &LagSpec,
    cfg: &EstimatorConfig,
    kind: SurrogateKind,
    n_surrogates: usize,
    seed: u64,
) -> Result<TransferResult> {
    let plan = SurrogatePlan { kind, count: n_surrogates, seed };
    single(rte_effective_alphas(
        &MultiSeries::scalar(target)?,
        &MultiSeries::scalar(source)?,
        spec,
        cfg,
        &plan,
        &[cfg.alpha],
    ))
}

pub fn rte_balance_effective(
    target: &[f64],
    source: &[f64],
    spec: &LagSpec,
    cfg: &EstimatorConfig,
    kind: SurrogateKind,
    n_surrogates: usize,
    seed: u64,
) -> Result<TransferResult> {
    let plan = SurrogatePlan { kind, count: n_surrogates, seed };
    single(rte_balance_effective_alphas(
        &MultiSeries::scalar(target)?,
        &MultiSeries::scalar(source)?,
        spec,
        cfg,
        &plan,
        &[cfg.alpha],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(n: usize, offset: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 + offset).collect()
    }

    #[test]
    fn lag_spec_invariants() {
        let s = LagSpec::new(vec![1, 0], 1, vec![0]).unwrap();
        assert_eq!(s.target_lags(), &[0, 1]);
        assert_eq!(s.max_lag(), 1);
        assert_eq!(s.to_string(), "{0,1},1,{0}");
        assert_eq!("{ 1, 0 }, 1, {0}".parse::<LagSpec>().unwrap(), s);
        for bad in ["{0,1},1", "{0,1},0,{0}", "0,1,{0}", "{},1,{0}", "{0,0},1,{0}", "{0},x,{0}"] {
            assert!(bad.parse::<LagSpec>().is_err(), "{bad}");
        }
        assert!(LagSpec::new(vec![], 1, vec![0]).is_err());
        assert!(LagSpec::new(vec![0, 0], 1, vec![0]).is_err());
        assert!(LagSpec::new(vec![0], 0, vec![0]).is_err());
    }

    #[test]
    fn embedding_rows_follow_the_anchor() {
        let x = seq(10, 0.0);
        let y = seq(10, 100.0);
        let spec = LagSpec::new(vec![0, 1], 1, vec![0]).unwrap();
        let e = delay_embed(&x, &y, &spec).unwrap();
        assert_eq!(e.full.len(), 8);
        assert_eq!(e.full.point(0), &[2.0, 1.0, 0.0, 101.0]);
        assert_eq!(e.future_past.dim(), 3);
        assert_eq!(e.past.dim(), 2);
        assert_eq!(e.past_source.point(7), &[8.0, 7.0, 108.0]);
    }

    #[test]
    fn single_lag_embedding() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let spec = LagSpec::new(vec![0], 1, vec![0]).unwrap();
        let e = delay_embed(&x, &x, &spec).unwrap();
        assert_eq!(e.past.as_flat(), &[1.0, 2.0, 3.0]);
        assert_eq!(e.future_past.as_flat(), &[2.0, 1.0, 3.0, 2.0, 4.0, 3.0]);
    }

    #[test]
    fn multichannel_embedding_interleaves_channels() {
        let t = MultiSeries::from_channels(&[&seq(6, 0.0), &seq(6, 10.0)]).unwrap();
        let s = MultiSeries::from_channels(&[&seq(6, 100.0)]).unwrap();
        let spec = LagSpec::new(vec![0], 2, vec![1]).unwrap();
        let e = delay_embed_multi(&t, &s, &spec).unwrap();
        // anchor n = 1: future t[3], past t[1], source s[0]
        assert_eq!(e.full.point(0), &[3.0, 13.0, 1.0, 11.0, 100.0]);
        assert_eq!(e.full.len(), 3);
    }

    #[test]
    fn length_errors() {
        let spec = LagSpec::new(vec![0, 1], 1, vec![0]).unwrap();
        assert!(delay_embed(&seq(10, 0.0), &seq(9, 0.0), &spec).is_err());
        assert!(delay_embed(&seq(3, 0.0), &seq(3, 0.0), &spec).is_err());
        let cfg = EstimatorConfig::default();
        assert!(rte(&seq(40, 0.0), &seq(40, 0.5), &spec, &cfg).is_err());
    }

    #[test]
    fn constant_series_is_degenerate() {
        let x = vec![1.0; 200];
        let y: Vec<f64> = (0..200).map(|i| (i as f64 * 0.7).sin()).collect();
        let spec = LagSpec::new(vec![0], 1, vec![0]).unwrap();
        let err = rte(&x, &y, &spec, &EstimatorConfig::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample { .. }));
    }
}
