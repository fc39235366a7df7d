//! SED equation of motion for a single charge in one dimension:
//! `dx/dt = p/m`, `dp/dt = -V'(x) + F_rr + F(t)`, with the zero-point force
//! `F(t)` taken as the free field and the radiation reaction in its
//! order-reduced form.

mod config;
mod ensemble;
mod integrator;
mod report;

pub use config::{InitialCondition, IntegratorSettings, RadiationReaction, SedConfig};
pub use ensemble::{
    ensemble_trajectory, realization_for, run_ensemble, EnsembleStats, Estimate, HalfDrift,
    WindowEstimate,
};
pub use integrator::{
    integrate_trajectory, radiation_reaction_force, write_trajectory_csv, ParticleState, Trajectory,
};
pub use report::{stationary_report, ComparisonReport, ComparisonRow, OracleMoments};

pub use crate::potential::drift_force;
