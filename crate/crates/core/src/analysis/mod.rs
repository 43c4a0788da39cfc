//! Bound calculus and live monitors for the flow.

mod bounds;
mod monitor;

pub use bounds::{
    comparison_bounds, default_c2, existence_horizon, phi, threshold_constants, window_bound,
    ComparisonBound, ControlParams, Thresholds,
};
pub use monitor::{
    bochner_residual, classify_termination, gradient_check, gradient_check_with, integrate_samples,
    total_energies, BochnerResidual, Classification, Energies, EnergyReport, GradientCheck,
    Monitor, Sample, BOCHNER_TOLERANCE_FACTOR,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("invalid control parameters: {0}")]
    InvalidParams(String),
    #[error("window s = {s} must be below 1/(D(4D+2)C2) = {s_max}")]
    WindowTooLarge { s: f64, s_max: f64 },
}
