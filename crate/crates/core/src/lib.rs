//! Stochastic electrodynamics and truncated Moyal phase-space dynamics.
//!
//! - [`zpf_field`]: synthesis and diagnostics of the zero-point field.
//! - [`sed_dynamics`]: Langevin-type trajectories of a charge driven by that field.
//! - [`phase_space`]: Wigner functions evolved by the truncated Moyal series.
//! - [`quantum_oracle`]: closed-form and brute-force quantum references.

pub mod error;
pub mod phase_space;
pub mod potential;
pub mod quantum_oracle;
pub mod rng;
pub mod sed_dynamics;
pub mod stats;
mod trig;
pub mod units;
pub mod zpf_field;

pub use error::{Result, SimError};
pub use potential::PotentialSpec;
pub use units::UnitSystem;
