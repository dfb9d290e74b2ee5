//! Experiment driver for the coupled Rossler pair: configuration files,
//! coupling sweeps, CSV and SVG output, and the closed-form self-checks behind
//! the `renyite` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod sweep;
pub mod validate;

pub use config::{ConfigMap, Direction, QuantityKind, SweepConfig};
pub use error::{CliError, Result};
pub use output::{emit_csv, read_csv};
pub use plot::emit_plot;
pub use sweep::{run_sweep, run_sweep_resuming, SweepResult, SweepRow};
