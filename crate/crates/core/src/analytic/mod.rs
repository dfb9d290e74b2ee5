//! Closed forms relating Renyi transfer entropy to Granger causality.
//!
//! All quantities are computed in nats and converted to the requested base on
//! output.

mod alpha_gaussian;
mod escort;
mod gaussian;
mod regression;

pub use alpha_gaussian::{alpha_gaussian_cond_mi, alpha_gaussian_entropy_unit, taylor_correction};
pub use escort::escort_distribution;
pub use gaussian::{gaussian_renyi_entropy, partial_covariance, GaussianModel};
pub use regression::{granger_f, least_squares, RegressionFit};
