//! Wigner functions on a phase-space grid evolved by the truncated Moyal series.

mod evolve;
mod grid;
mod moyal;
mod scaling;
pub mod stencil;

pub use evolve::{
    evolve_wigner, evolve_wigner_observed, max_stable_dt, min_jump_ratio, steps_for,
    EvolutionSummary, WignerEvolution, CFL_FACTOR, DISPERSIVE_LIMIT, ESCAPE_FRACTION,
};
pub use grid::{
    expectation, marginal, read_grid_binary, read_grid_csv, write_grid_binary, write_grid_csv,
    Axis, PhaseAxis, PhasePolynomial, WignerGrid, BOUNDARY_CELLS, BOUNDARY_TOLERANCE,
    MAX_OBSERVABLE_DEGREE, NORMALIZATION_TOLERANCE,
};
pub use moyal::{
    moyal_rhs, moyal_rhs_with_closure, series_coefficient, HamiltonianSpec, MoyalOrder,
};
pub use scaling::{hbar_scaling_study, ScalingPoint, ScalingReport, ScalingSetup};
pub use stencil::EdgeClosure;
