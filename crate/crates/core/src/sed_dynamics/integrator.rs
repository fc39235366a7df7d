use serde::{Deserialize, Serialize};
use std::io::Write;

use super::config::{IntegratorSettings, RadiationReaction};
use crate::error::{Result, SimError};
use crate::potential::{drift_force, PotentialSpec};
use crate::zpf_field::FieldRealization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub x: f64,
    pub p: f64,
    pub t: f64,
}

impl ParticleState {
    pub fn new(x: f64, p: f64) -> Self {
        ParticleState { x, p, t: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p.is_finite()
    }

    pub fn energy(&self, potential: &PotentialSpec, mass: f64) -> f64 {
        0.5 * self.p * self.p / mass + potential.value(self.x)
    }
}

/// Decimated history of one particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<ParticleState>,
    pub stride: usize,
    pub realization_seed: Option<u64>,
}

pub fn radiation_reaction_force(
    rr_model: RadiationReaction,
    potential: &PotentialSpec,
    state: &ParticleState,
    tau: f64,
    mass: f64,
) -> f64 {
    match rr_model {
        RadiationReaction::OrderReduced => -tau * potential.derivative(2, state.x) * state.p / mass,
        RadiationReaction::None => 0.0,
    }
}

/// Fourth-order Runge-Kutta integration, calling `visit` on the initial state
/// and after every step. Returns the final state.
pub(crate) fn integrate_with(
    settings: &IntegratorSettings,
    drive: Option<&FieldRealization>,
    init: ParticleState,
    mut visit: impl FnMut(usize, &ParticleState),
) -> Result<ParticleState> {
    settings.validate()?;
    let n_steps = settings.n_steps();
    let dt = settings.dt;
    let half = 0.5 * dt;
    let mass = settings.units.mass;
    let tau = match settings.rr_model {
        RadiationReaction::OrderReduced => settings.units.tau(),
        RadiationReaction::None => 0.0,
    };
    let potential = &settings.potential;
    let t0 = init.t;

    // Force samples at every half step: index 2n is t_n, 2n+1 the midpoint.
    let force = match drive {
        Some(field) => Some(field.eval_field_grid(t0, half, 2 * n_steps + 1)?),
        None => None,
    };
    let force_at = |i: usize| force.as_ref().map_or(0.0, |f| f[i]);

    let accel = |x: f64, p: f64, f_ext: f64| -> f64 {
        let rr = -tau * potential.derivative(2, x) * p / mass;
        drift_force(potential, x) + rr + f_ext
    };

    let mut state = init;
    if !state.is_finite() {
        return Err(SimError::IntegrationBlowup {
            time: state.t,
            trajectory: None,
        });
    }
    visit(0, &state);
    for n in 0..n_steps {
        let (x, p) = (state.x, state.p);
        let (f0, fm, f1) = (force_at(2 * n), force_at(2 * n + 1), force_at(2 * n + 2));

        let k1x = p / mass;
        let k1p = accel(x, p, f0);
        let k2x = (p + half * k1p) / mass;
        let k2p = accel(x + half * k1x, p + half * k1p, fm);
        let k3x = (p + half * k2p) / mass;
        let k3p = accel(x + half * k2x, p + half * k2p, fm);
        let k4x = (p + dt * k3p) / mass;
        let k4p = accel(x + dt * k3x, p + dt * k3p, f1);

        state = ParticleState {
            x: x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            p: p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            t: t0 + (n + 1) as f64 * dt,
        };
        if !state.is_finite() {
            return Err(SimError::IntegrationBlowup {
                time: state.t,
                trajectory: None,
            });
        }
        visit(n + 1, &state);
    }
    Ok(state)
}

/// Integrate one trajectory; `drive = None` means `F = 0`.
pub fn integrate_trajectory(
    settings: &IntegratorSettings,
    drive: Option<&FieldRealization>,
    init: ParticleState,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(settings.n_steps() / settings.stride.max(1) + 1);
    let stride = settings.stride;
    integrate_with(settings, drive, init, |n, s| {
        if n % stride == 0 {
            states.push(*s);
        }
    })?;
    Ok(Trajectory {
        states,
        stride,
        realization_seed: drive.map(|f| f.seed()),
    })
}

/// `t,x,p` rows with a header line.
pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, mut out: W) -> Result<()> {
    writeln!(out, "t,x,p")?;
    for s in &trajectory.states {
        writeln!(out, "{:?},{:?},{:?}", s.t, s.x, s.p)?;
    }
    Ok(())
}
