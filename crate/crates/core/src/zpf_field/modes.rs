use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::rng::{CounterRng, Purpose};
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub omega: f64,
    /// Force-noise amplitude `h_l`.
    pub weight: f64,
}

/// How mode frequencies are placed inside the uniform bins of the band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyStrategy {
    /// Bin centers.
    Uniform,
    /// One frequency drawn uniformly inside each bin, from stream `(seed, stream)`.
    StratifiedJitter { seed: u64, stream: u64 },
}

/// Discretized band of field modes with strictly increasing frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    modes: Vec<Mode>,
    omega_min: f64,
    omega_max: f64,
}

impl ModeSet {
    /// Validating constructor for externally supplied modes.
    pub fn from_modes(modes: Vec<Mode>, omega_min: f64, omega_max: f64) -> Result<Self> {
        if !(omega_min > 0.0 && omega_min < omega_max && omega_max.is_finite()) {
            return config_err(format!("invalid band [{omega_min}, {omega_max}]"));
        }
        if modes.is_empty() {
            return config_err("mode set is empty");
        }
        for pair in modes.windows(2) {
            if !(pair[1].omega > pair[0].omega) {
                return config_err("mode frequencies must be strictly increasing");
            }
        }
        for m in &modes {
            if !(m.omega >= omega_min && m.omega <= omega_max) {
                return config_err(format!("mode frequency {} outside band", m.omega));
            }
            if !(m.weight >= 0.0 && m.weight.is_finite()) {
                return config_err(format!("mode weight {} must be finite and >= 0", m.weight));
            }
        }
        Ok(ModeSet {
            modes,
            omega_min,
            omega_max,
        })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// Highest mode frequency actually present.
    pub fn highest_omega(&self) -> f64 {
        self.modes.last().map_or(self.omega_max, |m| m.omega)
    }

    /// `sum_l h_l^2`, the variance of the synthesized force.
    pub fn band_power(&self) -> f64 {
        self.modes.iter().map(|m| m.weight * m.weight).sum()
    }

    /// Same frequencies with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> ModeSet {
        ModeSet {
            modes: self
                .modes
                .iter()
                .map(|m| Mode {
                    omega: m.omega,
                    weight: m.weight * factor,
                })
                .collect(),
            omega_min: self.omega_min,
            omega_max: self.omega_max,
        }
    }
}

/// Mode set whose weights follow the zero-point force spectrum `hbar m tau w^3 / pi`.
pub fn build_mode_set(
    omega_min: f64,
    omega_max: f64,
    n_modes: usize,
    units: &UnitSystem,
    strategy: FrequencyStrategy,
) -> Result<ModeSet> {
    build_mode_set_with_density(omega_min, omega_max, n_modes, strategy, |w| {
        units.force_spectral_density(w)
    })
}

/// Mode set with `h_l^2 = S(w_l) * dw` for an arbitrary one-sided density `S`.
pub fn build_mode_set_with_density(
    omega_min: f64,
    omega_max: f64,
    n_modes: usize,
    strategy: FrequencyStrategy,
    density: impl Fn(f64) -> f64,
) -> Result<ModeSet> {
    if !(omega_min > 0.0 && omega_min < omega_max && omega_max.is_finite()) {
        return config_err(format!(
            "band must satisfy 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
        ));
    }
    if n_modes < 2 {
        return config_err(format!("n_modes must be at least 2, got {n_modes}"));
    }
    let width = (omega_max - omega_min) / n_modes as f64;
    let mut jitter = match strategy {
        FrequencyStrategy::Uniform => None,
        FrequencyStrategy::StratifiedJitter { seed, stream } => {
            Some(CounterRng::new(seed, Purpose::Jitter, stream))
        }
    };
    let mut modes = Vec::with_capacity(n_modes);
    for l in 0..n_modes {
        let offset = match jitter.as_mut() {
            None => 0.5,
            Some(rng) => rng.uniform(),
        };
        let lo = omega_min + l as f64 * width;
        // Keep the last bin's draw inside the band despite rounding in `lo`.
        let omega = (lo + offset * width).min(omega_max);
        let s = density(omega);
        if !(s >= 0.0 && s.is_finite()) {
            return config_err(format!("spectral density at {omega} is {s}"));
        }
        modes.push(Mode {
            omega,
            weight: (s * width).sqrt(),
        });
    }
    ModeSet::from_modes(modes, omega_min, omega_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn units() -> UnitSystem {
        UnitSystem::reduced(0.01).unwrap()
    }

    /// Independent composite trapezoid of the force spectrum on a fine grid.
    fn band_integral(units: &UnitSystem, lo: f64, hi: f64) -> f64 {
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let ys: Vec<f64> = (0..=n)
            .map(|i| units.force_spectral_density(lo + i as f64 * h))
            .collect();
        crate::stats::trapezoid(&ys, h)
    }

    #[test]
    fn degenerate_band_rejected() {
        let u = units();
        assert!(build_mode_set(1.0, 1.0, 1, &u, FrequencyStrategy::Uniform).is_err());
        assert!(build_mode_set(1.0, 2.0, 1, &u, FrequencyStrategy::Uniform).is_err());
        assert!(build_mode_set(0.0, 2.0, 10, &u, FrequencyStrategy::Uniform).is_err());
        assert!(build_mode_set(2.0, 1.0, 10, &u, FrequencyStrategy::Uniform).is_err());
    }

    #[test]
    fn band_power_matches_quadrature() {
        let u = units();
        let set = build_mode_set(0.5, 1.5, 100, &u, FrequencyStrategy::Uniform).unwrap();
        let oracle = band_integral(&u, 0.5, 1.5);
        // closed form (tau/pi)(1.5^4 - 0.5^4)/4
        assert!((oracle - 0.01 / PI * 5.0 / 4.0).abs() < 1e-9);
        assert!((set.band_power() - oracle).abs() / oracle < 0.01);
        assert!((set.band_power() - 3.98e-3).abs() < 1e-5);
    }

    #[test]
    fn jittered_band_power_within_one_percent() {
        let u = units();
        let oracle = band_integral(&u, 0.2, 5.0);
        for stream in 0..5 {
            let set = build_mode_set(
                0.2,
                5.0,
                256,
                &u,
                FrequencyStrategy::StratifiedJitter { seed: 11, stream },
            )
            .unwrap();
            assert!((set.band_power() - oracle).abs() / oracle < 0.01);
        }
    }

    #[test]
    fn frequencies_sorted_and_in_band() {
        let u = units();
        for strategy in [
            FrequencyStrategy::Uniform,
            FrequencyStrategy::StratifiedJitter { seed: 3, stream: 9 },
        ] {
            let set = build_mode_set(0.2, 5.0, 300, &u, strategy).unwrap();
            assert_eq!(set.n_modes(), 300);
            for pair in set.modes().windows(2) {
                assert!(pair[1].omega > pair[0].omega);
            }
            assert!(set.modes()[0].omega >= 0.2 && set.highest_omega() <= 5.0);
        }
    }

    #[test]
    fn jitter_is_deterministic_per_stream() {
        let u = units();
        let s = |stream| {
            build_mode_set(
                0.2,
                5.0,
                64,
                &u,
                FrequencyStrategy::StratifiedJitter { seed: 1, stream },
            )
            .unwrap()
        };
        assert_eq!(s(4), s(4));
        assert_ne!(s(4), s(5));
    }
}
