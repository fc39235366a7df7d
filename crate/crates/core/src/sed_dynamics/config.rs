use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{config_err, Result};
use crate::potential::PotentialSpec;
use crate::quantum_oracle::GaussianWignerParams;
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiationReaction {
    /// `-tau V''(x) p / m`: the third time derivative replaced by the time
    /// derivative of the conservative acceleration.
    OrderReduced,
    None,
}

/// Where each trajectory starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialCondition {
    Fixed {
        x0: f64,
        p0: f64,
    },
    /// Draw `(x0, p0)` per trajectory from a Gaussian Wigner function.
    Wigner(GaussianWignerParams),
}

/// What a single trajectory needs: physics, step and horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub units: UnitSystem,
    pub potential: PotentialSpec,
    pub rr_model: RadiationReaction,
    pub dt: f64,
    pub t_end: f64,
    /// Record every `stride`-th step in a [`Trajectory`](super::Trajectory).
    pub stride: usize,
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        self.units.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return config_err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return config_err(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.stride == 0 {
            return config_err("stride must be at least 1");
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Full stationary-ensemble experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SedConfig {
    pub units: UnitSystem,
    pub potential: PotentialSpec,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_modes: usize,
    /// Jitter mode frequencies inside their bins (fresh per trajectory).
    pub jitter: bool,
    pub dt: f64,
    pub t_end: f64,
    pub t_burn: f64,
    pub n_trajectories: usize,
    pub rr_model: RadiationReaction,
    pub init: InitialCondition,
    pub stride: usize,
    /// Worker threads for the ensemble; 0 means the rayon default.
    pub workers: usize,
}

impl SedConfig {
    /// Harmonic oscillator `V = m w0^2 x^2 / 2` with the documented defaults:
    /// band `[0.2, 5] w0`, 256 jittered modes, `dt = 0.02 / w0`, five relaxation
    /// times of burn-in, an equally long measurement window, start at rest.
    pub fn harmonic_default(units: UnitSystem) -> Self {
        let t_relax = 1.0 / (units.gamma * units.omega0);
        SedConfig {
            units,
            potential: PotentialSpec::harmonic(units.mass, units.omega0),
            omega_min: 0.2 * units.omega0,
            omega_max: 5.0 * units.omega0,
            n_modes: 256,
            jitter: true,
            dt: 0.02 / units.omega0,
            t_end: 10.0 * t_relax,
            t_burn: 5.0 * t_relax,
            n_trajectories: 500,
            rr_model: RadiationReaction::OrderReduced,
            init: InitialCondition::Fixed { x0: 0.0, p0: 0.0 },
            stride: 50,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.units.validate()?;
        if !self.potential.is_confining() {
            return config_err(
                "stationary statistics need a confining potential (even leading power, positive coefficient)",
            );
        }
        if !(self.omega_min > 0.0 && self.omega_min < self.omega_max && self.omega_max.is_finite())
        {
            return config_err(format!(
                "band must satisfy 0 < omega_min < omega_max, got [{}, {}]",
                self.omega_min, self.omega_max
            ));
        }
        if self.n_modes < 2 {
            return config_err("n_modes must be at least 2");
        }
        let dt_max = (0.02 * 2.0 * PI / self.units.omega0).min(PI / (2.0 * self.omega_max));
        if !(self.dt > 0.0 && self.dt <= dt_max) {
            return config_err(format!("dt = {} must lie in (0, {dt_max}]", self.dt));
        }
        let burn_min = 5.0 / (self.units.gamma * self.units.omega0);
        if !(self.t_burn >= burn_min * (1.0 - 1e-12)) {
            return config_err(format!(
                "t_burn = {} shorter than five relaxation times ({burn_min})",
                self.t_burn
            ));
        }
        if !(self.t_end >= 2.0 * self.t_burn) {
            return config_err(format!(
                "t_end = {} must be at least 2 t_burn = {}",
                self.t_end,
                2.0 * self.t_burn
            ));
        }
        if self.n_trajectories < 2 {
            return config_err("n_trajectories must be at least 2");
        }
        if self.stride == 0 {
            return config_err("stride must be at least 1");
        }
        if let InitialCondition::Fixed { x0, p0 } = self.init {
            if !(x0.is_finite() && p0.is_finite()) {
                return config_err("initial condition must be finite");
            }
        }
        Ok(())
    }

    pub fn integrator_settings(&self) -> IntegratorSettings {
        IntegratorSettings {
            units: self.units,
            potential: self.potential.clone(),
            rr_model: self.rr_model,
            dt: self.dt,
            t_end: self.t_end,
            stride: self.stride,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_harmonic_is_valid() {
        let cfg = SedConfig::harmonic_default(UnitSystem::reduced(0.01).unwrap());
        cfg.validate().unwrap();
        assert_eq!(cfg.t_burn, 500.0);
        assert_eq!(cfg.t_end, 1000.0);
    }

    #[test]
    fn inverted_quartic_rejected() {
        let mut cfg = SedConfig::harmonic_default(UnitSystem::reduced(0.01).unwrap());
        cfg.potential = PotentialSpec::quartic(-1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn step_and_window_limits() {
        let base = SedConfig::harmonic_default(UnitSystem::reduced(0.01).unwrap());
        let mut c = base.clone();
        c.dt = 0.2;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.t_burn = 100.0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.t_end = 900.0;
        assert!(c.validate().is_err());
        let mut c = base;
        c.omega_max = 100.0;
        assert!(c.validate().is_err());
    }
}
