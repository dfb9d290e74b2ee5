//! Coupled Rossler oscillators: integration and Lyapunov spectra.

mod lyapunov;
mod ode;
mod rossler;

pub use lyapunov::{lyapunov_spectrum, lyapunov_spectrum_with, LyapunovConfig, LyapunovSpectrum};
pub use ode::{DenseStep, Dopri5, Tolerances};
pub use rossler::{
    integrate_coupled, integrate_coupled_with, integrate_master, rossler_rhs, Coupling, RosslerParams, Trajectory,
};
