//! Nearest-neighbour Renyi and Shannon entropy estimators with rank ensembles.
//!
//! For rank `ℓ`, dimension `m`, sample size `N` and `ρ_i` the distance from
//! point `i` to its `ℓ`-th neighbour, the order-α estimate (α ≠ 1) is
//!
//! ```text
//! H = ln((N-1) V_m) + [ln Γ(ℓ) - ln Γ(ℓ+1-α) + ln((1/N) Σ ρ_i^{m(1-α)})] / (1-α)
//! ```
//!
//! and the Shannon branch is the Kozachenko-Leonenko form
//! `ψ(N) - ψ(ℓ) + ln V_m + (m/N) Σ ln ρ_i`. Both are evaluated in nats and
//! converted to the configured base at the end. Averaging over
//! `ℓ = n_min..=n_max` gives the ensemble mean and Bessel-corrected spread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkernel::{digamma, gamma_ln, knn_table, ln_unit_ball_volume, NeighborTable, PointCloud};

/// Base of the logarithm used for reported entropies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub const E: LogBase = LogBase(std::f64::consts::E);
    pub const TWO: LogBase = LogBase(2.0);

    pub fn new(base: f64) -> Result<Self> {
        if !(base > 0.0) || base == 1.0 || !base.is_finite() {
            return Err(Error::Domain(format!("logarithm base must be positive and not 1, got {base}")));
        }
        Ok(Self(base))
    }

    pub fn base(self) -> f64 {
        self.0
    }

    /// Converts a value measured in nats into this base.
    #[inline]
    pub fn from_nats(self, nats: f64) -> f64 {
        if self == Self::E {
            nats
        } else {
            nats / self.0.ln()
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        Self::E
    }
}

/// What to do when two samples coincide and a neighbour distance is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Fail with [`Error::DegenerateSample`].
    #[default]
    Error,
    /// Add uniform noise of amplitude `1e-12 ×` the bounding-box diameter and retry.
    Jitter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub alpha: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub log_base: LogBase,
    pub duplicates: DuplicatePolicy,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { alpha: 1.0, n_min: 5, n_max: 50, log_base: LogBase::E, duplicates: DuplicatePolicy::Error }
    }
}

impl EstimatorConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self { alpha, ..Self::default() }
    }

    pub fn ranks(mut self, n_min: usize, n_max: usize) -> Self {
        self.n_min = n_min;
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::Argument(format!(
                "neighbour ranks must satisfy 1 <= n_min <= n_max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!("Renyi order must be finite and >= 0, got {}", self.alpha)));
        }
        // Rank 1 depends on the dimension and is checked at evaluation time.
        if self.n_min > 1 {
            let max = max_convergent_alpha(self.n_min, 1);
            if self.alpha > max {
                return Err(Error::ConvergenceRange { alpha: self.alpha, rank: self.n_min, max });
            }
        }
        Ok(())
    }
}

/// Largest order for which the rank-`rank` estimator converges in dimension `dim`.
pub fn max_convergent_alpha(rank: usize, dim: usize) -> f64 {
    if rank == 1 {
        1.0 + 1.0 / (2.0 * dim as f64)
    } else {
        (rank as f64 + 1.0) / 2.0
    }
}

/// Per-rank entropies with their mean and Bessel-corrected standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub per_rank: Vec<(usize, f64)>,
    pub mean: f64,
    pub std: f64,
}

impl EntropyEstimate {
    pub fn from_per_rank(per_rank: Vec<(usize, f64)>) -> Self {
        let values: Vec<f64> = per_rank.iter().map(|&(_, v)| v).collect();
        let (mean, std) = mean_and_std(&values);
        Self { per_rank, mean, std }
    }
}

/// Mean and Bessel-corrected standard deviation; a single value has std 0.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

fn check_rank(cloud: &PointCloud, table: &NeighborTable, rank: usize) -> Result<()> {
    if table.len() != cloud.len() {
        return Err(Error::Argument(format!(
            "neighbour table has {} rows but the cloud has {} points",
            table.len(),
            cloud.len()
        )));
    }
    if rank == 0 || rank > table.max_rank() {
        return Err(Error::Argument(format!("rank {rank} outside 1..={}", table.max_rank())));
    }
    Ok(())
}

fn check_alpha_for_rank(alpha: f64, rank: usize, dim: usize) -> Result<()> {
    let max = max_convergent_alpha(rank, dim);
    if !(alpha >= 0.0) || alpha > max || rank as f64 + 1.0 - alpha <= 0.0 {
        return Err(Error::ConvergenceRange { alpha, rank, max });
    }
    Ok(())
}

/// Order-α (α ≠ 1) entropy estimate at a single neighbour rank, in nats.
pub fn renyi_entropy_knn(cloud: &PointCloud, table: &NeighborTable, alpha: f64, rank: usize) -> Result<f64> {
    check_rank(cloud, table, rank)?;
    if alpha == 1.0 {
        return Err(Error::Domain("alpha = 1 is the Shannon branch; use shannon_entropy_knn".into()));
    }
    check_alpha_for_rank(alpha, rank, cloud.dim())?;
    Ok(renyi_ranks(cloud.len(), cloud.dim(), table, alpha, rank, rank)?[0])
}

/// Kozachenko-Leonenko Shannon entropy estimate at a single rank, in nats.
pub fn shannon_entropy_knn(cloud: &PointCloud, table: &NeighborTable, rank: usize) -> Result<f64> {
    check_rank(cloud, table, rank)?;
    Ok(shannon_ranks(cloud.len(), cloud.dim(), table, rank, rank)?[0])
}

fn renyi_ranks(n: usize, dim: usize, table: &NeighborTable, alpha: f64, lo: usize, hi: usize) -> Result<Vec<f64>> {
    let width = hi - lo + 1;
    let one_minus = 1.0 - alpha;
    let power = dim as f64 * one_minus;
    let base = ((n - 1) as f64).ln() + ln_unit_ball_volume(dim)?;
    let ln_mean: Vec<f64> = if power == 0.0 {
        vec![0.0; width]
    } else {
        // Streaming log-sum-exp of power * ln ρ per rank.
        let mut max = vec![f64::NEG_INFINITY; width];
        let mut sum = vec![0.0; width];
        let mut zeros = vec![0usize; width];
        for i in 0..n {
            let row = &table.row(i)[lo - 1..hi];
            for (k, &rho) in row.iter().enumerate() {
                if rho == 0.0 {
                    zeros[k] += 1;
                    continue;
                }
                let e = power * rho.ln();
                if e > max[k] {
                    sum[k] = sum[k] * (max[k] - e).exp() + 1.0;
                    max[k] = e;
                } else {
                    sum[k] += (e - max[k]).exp();
                }
            }
        }
        if power < 0.0 {
            if let Some(k) = zeros.iter().position(|&z| z > 0) {
                return Err(Error::DegenerateSample { rank: lo + k, zeros: zeros[k] });
            }
        }
        // Zero distances contribute ρ^power = 0 when power > 0.
        max.iter().zip(&sum).map(|(m, s)| m + s.ln() - (n as f64).ln()).collect()
    };
    (lo..=hi)
        .zip(ln_mean)
        .map(|(rank, lm)| {
            let gamma_term = gamma_ln(rank as f64)? - gamma_ln(rank as f64 + one_minus)?;
            Ok(base + (gamma_term + lm) / one_minus)
        })
        .collect()
}

fn shannon_ranks(n: usize, dim: usize, table: &NeighborTable, lo: usize, hi: usize) -> Result<Vec<f64>> {
    let width = hi - lo + 1;
    let mut sums = vec![0.0; width];
    let mut zeros = vec![0usize; width];
    for i in 0..n {
        for (k, &rho) in table.row(i)[lo - 1..hi].iter().enumerate() {
            if rho == 0.0 {
                zeros[k] += 1;
            } else {
                sums[k] += rho.ln();
            }
        }
    }
    if let Some(k) = zeros.iter().position(|&z| z > 0) {
        return Err(Error::DegenerateSample { rank: lo + k, zeros: zeros[k] });
    }
    let base = digamma(n as f64)? + ln_unit_ball_volume(dim)?;
    (lo..=hi).zip(sums).map(|(rank, s)| Ok(base - digamma(rank as f64)? + dim as f64 * s / n as f64)).collect()
}

const JITTER_SEED: u64 = 0x6a69_7474_6572_2121;

/// A point cloud together with its neighbour table, built once and shared
/// across every order and rank evaluated on it.
#[derive(Debug, Clone)]
pub struct IndexedCloud {
    cloud: PointCloud,
    table: NeighborTable,
}

impl IndexedCloud {
    /// Builds the neighbour table up to `max_rank`, applying `policy` if any
    /// of those distances is zero.
    pub fn new(cloud: PointCloud, max_rank: usize, policy: DuplicatePolicy) -> Result<Self> {
        let table = knn_table(&cloud, max_rank)?;
        let zeros = table.zero_count_up_to(max_rank);
        if zeros == 0 {
            return Ok(Self { cloud, table });
        }
        let first_rank = (1..=max_rank).find(|&r| table.rank_column(r).any(|d| d == 0.0)).unwrap_or(1);
        match policy {
            DuplicatePolicy::Error => Err(Error::DegenerateSample { rank: first_rank, zeros }),
            DuplicatePolicy::Jitter => {
                let amplitude = 1e-12 * cloud.bounding_diameter();
                if amplitude == 0.0 {
                    return Err(Error::DegenerateSample { rank: first_rank, zeros });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
                let jittered = cloud.map_coords(|_, _, v| v + amplitude * (2.0 * rng.random::<f64>() - 1.0))?;
                let table = knn_table(&jittered, max_rank)?;
                let left = table.zero_count_up_to(max_rank);
                if left > 0 {
                    return Err(Error::DegenerateSample { rank: first_rank, zeros: left });
                }
                Ok(Self { cloud: jittered, table })
            }
        }
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn table(&self) -> &NeighborTable {
        &self.table
    }

    /// Entropies in nats for every rank in `n_min..=n_max`.
    pub fn per_rank_nats(&self, alpha: f64, n_min: usize, n_max: usize) -> Result<Vec<f64>> {
        if n_min == 0 || n_min > n_max || n_max > self.table.max_rank() {
            return Err(Error::Argument(format!(
                "rank range {n_min}..={n_max} not covered by a table of max rank {}",
                self.table.max_rank()
            )));
        }
        let (n, dim) = (self.cloud.len(), self.cloud.dim());
        if alpha == 1.0 {
            shannon_ranks(n, dim, &self.table, n_min, n_max)
        } else {
            for rank in n_min..=n_max {
                check_alpha_for_rank(alpha, rank, dim)?;
            }
            renyi_ranks(n, dim, &self.table, alpha, n_min, n_max)
        }
    }

    /// Rank ensemble for `cfg` (its `n_max` must not exceed the table).
    pub fn ensemble(&self, cfg: &EstimatorConfig) -> Result<EntropyEstimate> {
        cfg.validate()?;
        let nats = self.per_rank_nats(cfg.alpha, cfg.n_min, cfg.n_max)?;
        Ok(EntropyEstimate::from_per_rank(
            (cfg.n_min..=cfg.n_max).zip(nats).map(|(r, v)| (r, cfg.log_base.from_nats(v))).collect(),
        ))
    }
}

fn check_sample_size(cloud: &PointCloud, cfg: &EstimatorConfig) -> Result<()> {
    if cfg.n_max >= cloud.len() {
        return Err(Error::Argument(format!("n_max = {} needs more than {} points", cfg.n_max, cloud.len())));
    }
    Ok(())
}

/// Rank-ensemble entropy of a cloud; the neighbour table is built once at `n_max`.
pub fn entropy_ensemble(cloud: &PointCloud, cfg: &EstimatorConfig) -> Result<EntropyEstimate> {
    cfg.validate()?;
    check_sample_size(cloud, cfg)?;
    IndexedCloud::new(cloud.clone(), cfg.n_max, cfg.duplicates)?.ensemble(cfg)
}

/// `H(X | Y) = H(X ⊕ Y) - H(Y)` where `Y` is the projection of `joint` onto
/// `condition_dims`. Ranks are subtracted pairwise before ensembling.
pub fn conditional_renyi_entropy(
    joint: &PointCloud,
    condition_dims: &[usize],
    cfg: &EstimatorConfig,
) -> Result<EntropyEstimate> {
    cfg.validate()?;
    check_sample_size(joint, cfg)?;
    let mut dims = condition_dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    if dims.is_empty() || dims.len() >= joint.dim() || dims.len() != condition_dims.len() {
        return Err(Error::Argument(format!(
            "conditioning axes must be a proper, non-empty, duplicate-free subset of 0..{}",
            joint.dim()
        )));
    }
    let condition = joint.project(&dims)?;
    let joint_h = IndexedCloud::new(joint.clone(), cfg.n_max, cfg.duplicates)?.ensemble(cfg)?;
    let cond_h = IndexedCloud::new(condition, cfg.n_max, cfg.duplicates)?.ensemble(cfg)?;
    Ok(EntropyEstimate::from_per_rank(
        joint_h.per_rank.iter().zip(&cond_h.per_rank).map(|(&(r, a), &(_, b))| (r, a - b)).collect(),
    ))
}
