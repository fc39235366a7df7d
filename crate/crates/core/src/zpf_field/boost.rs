//! Monte Carlo test of the Lorentz invariance of a power-law spectrum.
//!
//! Plane-wave modes are drawn isotropically with mode density `w^(s-1)`, each
//! carrying zero-point energy `hbar w / 2`, so that the spectral energy density
//! goes as `w^s`. A boost along the z axis maps each mode to
//! `w' = g w (1 + beta cos(theta))` with the aberrated direction
//! `cos(theta') = (cos(theta) + beta) / (1 + beta cos(theta))`. With Doppler
//! factor `D = w'/w`, a mode's contribution to the energy density is multiplied
//! by `D^2`: one power from the frequency and one from the density of modes
//! per unit volume. Only `s = 3` leaves the binned spectrum unchanged, both
//! angle-integrated and direction by direction.

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::rng::{CounterRng, Purpose};
use crate::stats::fit_line;

/// Band the modes are drawn from.
pub const BOOST_SAMPLING_BAND: (f64, f64) = (0.25, 4.0);
/// Band analysed in both frames. Every boosted frequency in it comes from
/// inside the sampling band for `beta <= 0.6`.
pub const BOOST_ANALYSIS_BAND: (f64, f64) = (0.5, 2.0);

const N_FREQUENCY_BINS: usize = 12;
const N_DIRECTION_BINS: usize = 4;
const EXPONENT_TOLERANCE: f64 = 0.05;
const AMPLITUDE_TOLERANCE: f64 = 0.02;
const DIRECTIONAL_TOLERANCE: f64 = 0.05;
const MAX_BETA: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostSample {
    pub omega: f64,
    pub cos_theta: f64,
    /// Contribution to the energy density, in units where `hbar = 1`.
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostBin {
    pub omega_lo: f64,
    pub omega_hi: f64,
    /// Energy per unit angular frequency, per sample drawn.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostReport {
    pub beta: f64,
    pub spectral_exponent: f64,
    pub n_samples: usize,
    pub exponent_before: f64,
    pub exponent_after: f64,
    pub exponent_stderr: f64,
    /// Band energy after the boost over band energy before.
    pub amplitude_ratio: f64,
    /// Largest relative departure of a boosted-frame direction bin from the
    /// isotropic share of the unboosted band energy.
    pub directional_deviation: f64,
    pub invariant: bool,
    pub bins_before: Vec<BoostBin>,
    pub bins_after: Vec<BoostBin>,
}

/// Isotropic modes with frequency density `w^(exponent-1)` on the sampling band.
///
/// Frequencies are stratified over `n` equal-probability slots; directions are
/// independent uniform draws.
pub fn draw_power_law_modes(exponent: f64, n: usize, seed: u64) -> Vec<BoostSample> {
    let (a, b) = BOOST_SAMPLING_BAND;
    let mut freq_rng = CounterRng::new(seed, Purpose::Boost, 0);
    let mut dir_rng = CounterRng::new(seed, Purpose::Boost, 1);
    (0..n)
        .map(|i| {
            let u = (i as f64 + freq_rng.uniform()) / n as f64;
            let omega = if exponent == 0.0 {
                a * (b / a).powf(u)
            } else {
                let (lo, hi) = (a.powf(exponent), b.powf(exponent));
                (lo + u * (hi - lo)).powf(1.0 / exponent)
            };
            BoostSample {
                omega,
                cos_theta: 2.0 * dir_rng.uniform() - 1.0,
                energy: 0.5 * omega,
            }
        })
        .collect()
}

/// Modes seen from a frame moving with speed `beta` along `-z`.
pub fn boost_samples(samples: &[BoostSample], beta: f64) -> Vec<BoostSample> {
    let gamma = 1.0 / (1.0 - beta * beta).sqrt();
    samples
        .iter()
        .map(|s| {
            let doppler = gamma * (1.0 + beta * s.cos_theta);
            BoostSample {
                omega: doppler * s.omega,
                cos_theta: ((s.cos_theta + beta) / (1.0 + beta * s.cos_theta)).clamp(-1.0, 1.0),
                energy: s.energy * doppler * doppler,
            }
        })
        .collect()
}

/// Energy density in `n_bins` log-spaced bins over `band`.
pub fn bin_spectrum(samples: &[BoostSample], n_bins: usize, band: (f64, f64)) -> Vec<BoostBin> {
    let (lo, hi) = band;
    let log_width = (hi / lo).ln() / n_bins as f64;
    let mut sums = vec![0.0; n_bins];
    for s in samples {
        if s.omega < lo || s.omega >= hi {
            continue;
        }
        let k = (((s.omega / lo).ln() / log_width) as usize).min(n_bins - 1);
        sums[k] += s.energy;
    }
    let norm = 1.0 / samples.len().max(1) as f64;
    sums.iter()
        .enumerate()
        .map(|(k, e)| {
            let omega_lo = lo * (k as f64 * log_width).exp();
            let omega_hi = lo * ((k + 1) as f64 * log_width).exp();
            BoostBin {
                omega_lo,
                omega_hi,
                density: e * norm / (omega_hi - omega_lo),
            }
        })
        .collect()
}

fn fitted_exponent(bins: &[BoostBin]) -> (f64, f64) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = bins
        .iter()
        .filter(|b| b.density > 0.0)
        .map(|b| ((b.omega_lo * b.omega_hi).sqrt().ln(), b.density.ln()))
        .unzip();
    fit_line(&xs, &ys).map_or((f64::NAN, f64::NAN), |f| (f.slope, f.slope_stderr))
}

fn band_energy(samples: &[BoostSample], band: (f64, f64)) -> f64 {
    samples
        .iter()
        .filter(|s| s.omega >= band.0 && s.omega < band.1)
        .map(|s| s.energy)
        .sum()
}

pub fn boost_spectrum_check(
    spectral_exponent: f64,
    beta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<BoostReport> {
    if !(0.0..=MAX_BETA).contains(&beta) {
        return config_err(format!("beta must lie in [0, {MAX_BETA}], got {beta}"));
    }
    if n_samples < 100_000 {
        return config_err(format!("n_samples must be at least 1e5, got {n_samples}"));
    }
    if !(0.0..=5.0).contains(&spectral_exponent) {
        return config_err(format!(
            "spectral exponent must lie in [0, 5], got {spectral_exponent}"
        ));
    }

    let before = draw_power_law_modes(spectral_exponent, n_samples, seed);
    let after = boost_samples(&before, beta);
    let band = BOOST_ANALYSIS_BAND;

    let bins_before = bin_spectrum(&before, N_FREQUENCY_BINS, band);
    let bins_after = bin_spectrum(&after, N_FREQUENCY_BINS, band);
    let (exponent_before, se_before) = fitted_exponent(&bins_before);
    let (exponent_after, se_after) = fitted_exponent(&bins_after);

    let energy_before = band_energy(&before, band);
    let amplitude_ratio = band_energy(&after, band) / energy_before;

    let mut by_direction = [0.0; N_DIRECTION_BINS];
    for s in after
        .iter()
        .filter(|s| s.omega >= band.0 && s.omega < band.1)
    {
        let k = (((s.cos_theta + 1.0) * 0.5 * N_DIRECTION_BINS as f64) as usize)
            .min(N_DIRECTION_BINS - 1);
        by_direction[k] += s.energy;
    }
    let share = energy_before / N_DIRECTION_BINS as f64;
    let directional_deviation = by_direction
        .iter()
        .map(|e| (e / share - 1.0).abs())
        .fold(0.0, f64::max);

    let invariant = (exponent_after - exponent_before).abs() < EXPONENT_TOLERANCE
        && (amplitude_ratio - 1.0).abs() < AMPLITUDE_TOLERANCE
        && directional_deviation < DIRECTIONAL_TOLERANCE;

    Ok(BoostReport {
        beta,
        spectral_exponent,
        n_samples,
        exponent_before,
        exponent_after,
        exponent_stderr: se_before.hypot(se_after),
        amplitude_ratio,
        directional_deviation,
        invariant,
        bins_before,
        bins_after,
    })
}
