use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid argument (lengths, ranks, index sets).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The Renyi order is outside the interval where the nearest-neighbour
    /// estimator converges for the requested rank.
    #[error("alpha = {alpha} outside the convergence range of the rank-{rank} estimator (max {max})")]
    ConvergenceRange { alpha: f64, rank: usize, max: f64 },

    /// Zero neighbour distances make the estimator singular.
    #[error("degenerate sample: {zeros} zero neighbour distance(s) at rank {rank}")]
    DegenerateSample { rank: usize, zeros: usize },

    /// The least-squares design matrix does not have full column rank.
    #[error("rank-deficient design matrix (column {column})")]
    RankDeficient { column: usize },

    /// The integrator produced a non-finite state or its step size underflowed.
    #[error("integration diverged at t = {time}: {reason}")]
    Divergence { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
