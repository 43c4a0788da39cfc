//! Pseudoharmonic heat flow from compact Heisenberg nilmanifolds into
//! spheres and flat tori, with runtime monitors for the energy identities
//! and comparison bounds that govern small-energy convergence.

pub mod analysis;
pub mod checks;
pub mod commands;
pub mod config;
pub mod field;
pub mod flow;
pub mod geometry;
pub mod initial;
pub mod io;
pub mod operators;
pub mod oracle;
pub mod scalar;
pub mod target;

pub use scalar::Scalar;

/// Double-precision aliases used by the command-line layer.
pub type Grid = geometry::NilmanifoldGrid<f64>;
pub type Map = field::MapField<f64>;
pub type Params = analysis::ControlParams<f64>;
pub type Report = analysis::EnergyReport<f64>;
pub type Outcome = flow::FlowOutcome<f64>;
