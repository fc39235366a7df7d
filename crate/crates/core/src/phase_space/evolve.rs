use serde::Serialize;

use super::grid::WignerGrid;
use super::moyal::{HamiltonianSpec, MoyalOperator, MoyalOrder};
use super::stencil::EdgeClosure;
use crate::error::{config_err, Result, SimError};

/// Safety factor in the advective step bound.
pub const CFL_FACTOR: f64 = 0.2;
/// Bound on `dt` times the spectral radius of the correction terms.
pub const DISPERSIVE_LIMIT: f64 = 1.0;
/// Boundary mass fraction that aborts an evolution.
pub const ESCAPE_FRACTION: f64 = 1e-4;

/// Result of [`evolve_wigner`].
#[derive(Debug, Clone)]
pub struct WignerEvolution {
    pub grid: WignerGrid,
    pub dt: f64,
    pub n_steps: usize,
    pub initial_total: f64,
    pub final_total: f64,
    /// Minimum of W after each step, starting with the initial state.
    pub min_history: Vec<f64>,
    pub max_boundary_fraction: f64,
}

impl WignerEvolution {
    pub fn normalization_drift(&self) -> f64 {
        self.final_total - self.initial_total
    }

    pub fn summary(&self) -> EvolutionSummary {
        EvolutionSummary {
            dt: self.dt,
            n_steps: self.n_steps,
            initial_total: self.initial_total,
            final_total: self.final_total,
            normalization_drift: self.normalization_drift(),
            initial_min: self.min_history[0],
            final_min: *self.min_history.last().unwrap(),
            max_boundary_fraction: self.max_boundary_fraction,
            min_jump_ratio: min_jump_ratio(&self.min_history),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionSummary {
    pub dt: f64,
    pub n_steps: usize,
    pub initial_total: f64,
    pub final_total: f64,
    pub normalization_drift: f64,
    pub initial_min: f64,
    pub final_min: f64,
    pub max_boundary_fraction: f64,
    pub min_jump_ratio: f64,
}

/// Half-width of the window defining the typical increment around a step.
const JUMP_WINDOW: usize = 10;

/// Largest step-to-step change in `history` relative to the median change
/// over the surrounding steps.
pub fn min_jump_ratio(history: &[f64]) -> f64 {
    let steps: Vec<f64> = history.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let scale = history.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e-12 * scale).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    let mut window = Vec::with_capacity(2 * JUMP_WINDOW);
    for (k, &step) in steps.iter().enumerate() {
        window.clear();
        let lo = k.saturating_sub(JUMP_WINDOW);
        let hi = (k + JUMP_WINDOW + 1).min(steps.len());
        window.extend((lo..hi).filter(|&m| m != k).map(|m| steps[m]));
        if window.is_empty() {
            continue;
        }
        window.sort_by(f64::total_cmp);
        let typical = window[window.len() / 2].max(floor);
        worst = worst.max(step / typical);
    }
    worst
}

/// Largest stable `dt` for `grid` and `ham`, combining the advective bound
/// with the spectral radius of the high-order p-derivative terms.
pub fn max_stable_dt(grid: &WignerGrid, ham: &HamiltonianSpec, order: MoyalOrder) -> f64 {
    let (xa, pa) = (grid.x_axis(), grid.p_axis());
    let xs = xa.points();
    let max_force = xs
        .iter()
        .map(|&x| ham.potential.derivative(1, x).abs())
        .fold(0.0, f64::max);
    let advective = (xa.step() * ham.mass / pa.max_abs()).min(if max_force > 0.0 {
        pa.step() / max_force
    } else {
        f64::INFINITY
    });
    let op = MoyalOperator::new(grid, ham, order, EdgeClosure::default());
    let radius: f64 = op
        .corrections
        .iter()
        .map(|term| {
            let peak = term.row_factor.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            peak * term.stencil.symbol_bound()
        })
        .sum();
    let dispersive = if radius > 0.0 {
        DISPERSIVE_LIMIT / radius
    } else {
        f64::INFINITY
    };
    (CFL_FACTOR * advective).min(dispersive)
}

/// Integrates `∂W/∂t = moyal_rhs(W)` with classical RK4.
pub fn evolve_wigner(
    w0: &WignerGrid,
    ham: &HamiltonianSpec,
    order: MoyalOrder,
    dt: f64,
    n_steps: usize,
) -> Result<WignerEvolution> {
    evolve_wigner_observed(
        w0,
        ham,
        order,
        dt,
        n_steps,
        EdgeClosure::default(),
        |_, _| {},
    )
}

/// As [`evolve_wigner`] with an explicit edge treatment, calling
/// `observe(step, grid)` after every step.
pub fn evolve_wigner_observed(
    w0: &WignerGrid,
    ham: &HamiltonianSpec,
    order: MoyalOrder,
    dt: f64,
    n_steps: usize,
    closure: EdgeClosure,
    mut observe: impl FnMut(usize, &WignerGrid),
) -> Result<WignerEvolution> {
    ham.validate()?;
    w0.check_boundary()?;
    let limit = max_stable_dt(w0, ham, order);
    if !(dt > 0.0 && dt <= limit) {
        return config_err(format!(
            "time step {dt} outside the stable range (0, {limit:e}]"
        ));
    }
    let op = MoyalOperator::new(w0, ham, order, closure);
    let n = w0.values().len();
    let initial_total = w0.total();
    let mut grid = w0.clone();
    let mut stage = vec![0.0; n];
    let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut min_history = Vec::with_capacity(n_steps + 1);
    min_history.push(grid.min_value());
    let mut max_boundary_fraction = grid.boundary_mass_fraction();

    for step in 1..=n_steps {
        let y = grid.values();
        op.apply(y, &mut k[0]);
        for (s, (a, b)) in stage.iter_mut().zip(y.iter().zip(&k[0])) {
            *s = a + 0.5 * dt * b;
        }
        op.apply(&stage, &mut k[1]);
        for (s, (a, b)) in stage.iter_mut().zip(y.iter().zip(&k[1])) {
            *s = a + 0.5 * dt * b;
        }
        op.apply(&stage, &mut k[2]);
        for (s, (a, b)) in stage.iter_mut().zip(y.iter().zip(&k[2])) {
            *s = a + dt * b;
        }
        op.apply(&stage, &mut k[3]);
        let [k1, k2, k3, k4] = &k;
        for (idx, v) in grid.values_mut().iter_mut().enumerate() {
            *v += dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
        }

        let time = step as f64 * dt;
        if grid.values().iter().any(|v| !v.is_finite()) {
            return Err(SimError::IntegrationBlowup {
                time,
                trajectory: None,
            });
        }
        let fraction = grid.boundary_mass_fraction();
        max_boundary_fraction = max_boundary_fraction.max(fraction);
        if fraction > ESCAPE_FRACTION {
            return Err(SimError::GridEscape {
                time,
                boundary_mass: fraction,
            });
        }
        min_history.push(grid.min_value());
        observe(step, &grid);
    }

    let final_total = grid.total();
    Ok(WignerEvolution {
        grid,
        dt,
        n_steps,
        initial_total,
        final_total,
        min_history,
        max_boundary_fraction,
    })
}

/// Smallest number of equal steps covering `duration` within the stability bound.
pub fn steps_for(duration: f64, max_dt: f64) -> (f64, usize) {
    let n = (duration / max_dt).ceil().max(1.0) as usize;
    (duration / n as f64, n)
}
