use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Physical constants of a run in reduced units.
///
/// `gamma` is the dimensionless radiation-damping coupling `tau * omega0`;
/// the radiation time `tau` is derived from it. The fine-structure constant
/// and the speed of light only enter through `gamma` and are not inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
    pub omega0: f64,
    pub gamma: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            hbar: 1.0,
            mass: 1.0,
            omega0: 1.0,
            gamma: 0.01,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64, omega0: f64, gamma: f64) -> Result<Self> {
        let units = UnitSystem {
            hbar,
            mass,
            omega0,
            gamma,
        };
        units.validate()?;
        Ok(units)
    }

    /// Reduced units `hbar = m = omega0 = 1` with the given coupling.
    pub fn reduced(gamma: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return config_err(format!("hbar must be positive, got {}", self.hbar));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return config_err(format!("mass must be positive, got {}", self.mass));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return config_err(format!("omega0 must be positive, got {}", self.omega0));
        }
        if !(self.gamma > 0.0 && self.gamma < 0.1) {
            return config_err(format!(
                "gamma = tau*omega0 must lie in (0, 0.1), got {}",
                self.gamma
            ));
        }
        Ok(())
    }

    /// Radiation time `tau = gamma / omega0`.
    pub fn tau(&self) -> f64 {
        self.gamma / self.omega0
    }

    /// One-sided force-noise spectral density `hbar m tau omega^3 / pi`.
    ///
    /// This is the normalization for which a weakly damped oscillator with
    /// damping coefficient `m tau omega0^2` relaxes to `<x^2> = hbar / (2 m omega0)`.
    pub fn force_spectral_density(&self, omega: f64) -> f64 {
        self.hbar * self.mass * self.tau() * omega.powi(3) / std::f64::consts::PI
    }
}
