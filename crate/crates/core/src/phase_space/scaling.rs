use serde::{Deserialize, Serialize};

use super::evolve::{evolve_wigner, max_stable_dt, steps_for};
use super::grid::{Axis, WignerGrid};
use super::moyal::{HamiltonianSpec, MoyalOrder};
use crate::error::{config_err, Result};
use crate::potential::PotentialSpec;
use crate::quantum_oracle::GaussianWignerParams;
use crate::stats::{fit_line, LineFit};

/// Grid, initial state and time-step policy shared by every ħ in a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSetup {
    pub x_axis: Axis,
    pub p_axis: Axis,
    pub initial: GaussianWignerParams,
    pub mass: f64,
    /// Fraction of the stable step actually used.
    pub dt_fraction: f64,
}

impl ScalingSetup {
    /// Box, state and step used for the reference quartic study.
    pub fn quartic_reference() -> Self {
        ScalingSetup {
            x_axis: Axis {
                min: -3.5,
                max: 3.5,
                n: 141,
            },
            p_axis: Axis {
                min: -7.0,
                max: 7.0,
                n: 141,
            },
            initial: GaussianWignerParams::centered(0.2, 0.5).displaced(0.5, 0.0),
            mass: 1.0,
            dt_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub hbar: f64,
    /// L2 distance between order-1 and order-0 states at the final time.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub t_final: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub points: Vec<ScalingPoint>,
    /// Slopes between consecutive points in ascending ħ.
    pub local_slopes: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

fn validate_study(potential: &PotentialSpec, hbar_list: &[f64], t_final: f64) -> Result<()> {
    if potential.degree() < 3 {
        return config_err(
            "the scaling study needs an anharmonic potential; a quadratic one gives zero distance",
        );
    }
    if hbar_list.len() < 4 {
        return config_err(format!(
            "need at least 4 hbar values, got {}",
            hbar_list.len()
        ));
    }
    if hbar_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return config_err("hbar values must be positive");
    }
    let lo = hbar_list.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hbar_list.iter().copied().fold(0.0, f64::max);
    if hi < 2.0 * lo {
        return config_err(format!(
            "hbar values must span at least one octave, got [{lo}, {hi}]"
        ));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return config_err(format!("t_final must be positive, got {t_final}"));
    }
    Ok(())
}

/// Fits `log D` against `log ħ`, where `D(ħ)` is the L2 gap between the
/// Liouville and first-order Moyal evolutions of one physical initial state.
///
/// All runs share one time step, the stable step of the largest ħ, so the
/// Liouville run is ħ-independent and is computed once.
pub fn hbar_scaling_study(
    potential: &PotentialSpec,
    hbar_list: &[f64],
    t_final: f64,
    setup: &ScalingSetup,
) -> Result<ScalingReport> {
    validate_study(potential, hbar_list, t_final)?;
    if !(setup.dt_fraction > 0.0 && setup.dt_fraction <= 1.0) {
        return config_err(format!(
            "dt_fraction must be in (0, 1], got {}",
            setup.dt_fraction
        ));
    }
    for &hbar in hbar_list {
        setup.initial.validate(hbar)?;
    }
    let w0 = WignerGrid::gaussian(setup.x_axis, setup.p_axis, &setup.initial)?;
    let first = MoyalOrder::new(1)?;
    let hams: Vec<HamiltonianSpec> = hbar_list
        .iter()
        .map(|&h| HamiltonianSpec::new(setup.mass, potential.clone(), h))
        .collect::<Result<_>>()?;
    let max_dt = hams
        .iter()
        .map(|h| max_stable_dt(&w0, h, first))
        .fold(f64::INFINITY, f64::min);
    let (dt, n_steps) = steps_for(t_final, setup.dt_fraction * max_dt);

    let classical = evolve_wigner(&w0, &hams[0], MoyalOrder::LIOUVILLE, dt, n_steps)?.grid;
    let mut points = Vec::with_capacity(hams.len());
    for ham in &hams {
        let quantum = evolve_wigner(&w0, ham, first, dt, n_steps)?.grid;
        points.push(ScalingPoint {
            hbar: ham.hbar,
            distance: quantum.l2_distance(&classical),
        });
    }
    points.sort_by(|a, b| a.hbar.total_cmp(&b.hbar));
    let local_slopes = points
        .windows(2)
        .map(|w| (w[1].distance / w[0].distance).ln() / (w[1].hbar / w[0].hbar).ln())
        .collect();
    let logs_h: Vec<f64> = points.iter().map(|p| p.hbar.ln()).collect();
    let logs_d: Vec<f64> = points.iter().map(|p| p.distance.ln()).collect();
    let LineFit {
        slope,
        intercept,
        slope_stderr,
    } = fit_line(&logs_h, &logs_d)
        .ok_or_else(|| crate::SimError::Convergence("degenerate scaling fit".into()))?;
    Ok(ScalingReport {
        t_final,
        dt,
        n_steps,
        points,
        local_slopes,
        slope,
        slope_stderr,
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_quadratic_and_short_lists() {
        let setup = ScalingSetup::quartic_reference();
        let hbars = [0.05, 0.1, 0.2, 0.4];
        let err = hbar_scaling_study(&PotentialSpec::harmonic(1.0, 1.0), &hbars, 1.0, &setup)
            .unwrap_err();
        assert_eq!(err.kind(), "config");
        let q = PotentialSpec::quartic(0.25);
        assert!(hbar_scaling_study(&q, &hbars[..3], 1.0, &setup).is_err());
        assert!(hbar_scaling_study(&q, &[0.1, 0.12, 0.15, 0.19], 1.0, &setup).is_err());
    }
}
