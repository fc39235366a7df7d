//! Welch estimate of the force spectrum of one realization.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::realization::FieldRealization;
use crate::error::{config_err, Result};
use crate::stats::fit_line;

/// Averaged one-sided spectral density per unit angular frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub fit_exponent: f64,
    pub fit_stderr: f64,
    pub fit_range: (f64, f64),
    pub n_segments: usize,
}

/// Lower and upper fit limits as fractions of the band edges.
const FIT_LOW: f64 = 1.25;
const FIT_HIGH: f64 = 0.8;
/// Segment length in periods of the lowest band frequency.
const SEGMENT_PERIODS: f64 = 2.0;

pub fn estimate_spectrum(
    realization: &FieldRealization,
    duration: f64,
    dt: f64,
) -> Result<Periodogram> {
    let set = realization.mode_set();
    if set.n_modes() < 2 {
        return config_err("spectrum fit needs at least two modes");
    }
    let (omega_min, omega_max) = (set.omega_min(), set.omega_max());
    let min_duration = 50.0 * 2.0 * PI / omega_min;
    if !(duration >= min_duration) {
        return config_err(format!(
            "duration {duration} shorter than 50 periods of omega_min ({min_duration})"
        ));
    }
    let max_dt = PI / (4.0 * omega_max);
    if !(dt > 0.0 && dt <= max_dt) {
        return config_err(format!(
            "dt {dt} must lie in (0, pi/(4 omega_max) = {max_dt}]"
        ));
    }

    let n_samples = (duration / dt).floor() as usize;
    let seg_len = ((SEGMENT_PERIODS * 2.0 * PI / omega_min) / dt).ceil() as usize;
    let seg_len = seg_len.next_power_of_two();
    if seg_len > n_samples {
        return config_err("duration too short for one Welch segment");
    }
    let hop = seg_len / 2;
    let n_segments = (n_samples - seg_len) / hop + 1;

    let signal = realization.eval_field_grid(0.0, dt, n_samples)?;
    let window: Vec<f64> = (0..seg_len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / seg_len as f64).cos())
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();

    let fft = FftPlanner::<f64>::new().plan_fft_forward(seg_len);
    let half = seg_len / 2;
    let mut accum = vec![0.0; half + 1];
    let mut buffer = vec![Complex::new(0.0, 0.0); seg_len];
    for seg in 0..n_segments {
        let start = seg * hop;
        for (i, slot) in buffer.iter_mut().enumerate() {
            *slot = Complex::new(signal[start + i] * window[i], 0.0);
        }
        fft.process(&mut buffer);
        for (k, acc) in accum.iter_mut().enumerate() {
            *acc += buffer[k].norm_sqr();
        }
    }

    // One-sided density in angular frequency: dt |X_k|^2 / (pi sum w^2), halved at Nyquist.
    let scale = dt / (PI * window_power * n_segments as f64);
    let d_omega = 2.0 * PI / (seg_len as f64 * dt);
    let mut freqs = Vec::with_capacity(half);
    let mut power = Vec::with_capacity(half);
    for k in 1..=half {
        let nyquist = if k == half { 0.5 } else { 1.0 };
        freqs.push(k as f64 * d_omega);
        power.push(accum[k] * scale * nyquist);
    }

    let fit_range = (FIT_LOW * omega_min, FIT_HIGH * omega_max);
    let (lx, ly): (Vec<f64>, Vec<f64>) = freqs
        .iter()
        .zip(&power)
        .filter(|(w, p)| **w >= fit_range.0 && **w <= fit_range.1 && **p > 0.0)
        .map(|(w, p)| (w.ln(), p.ln()))
        .unzip();
    let fit = match fit_line(&lx, &ly) {
        Some(f) if lx.len() >= 3 => f,
        _ => return config_err("too few periodogram bins inside the fit range"),
    };

    Ok(Periodogram {
        freqs,
        power,
        fit_exponent: fit.slope,
        fit_stderr: fit.slope_stderr,
        fit_range,
        n_segments,
    })
}

impl Periodogram {
    /// Trapezoid integral of the density between two frequencies.
    pub fn band_integral(&self, lo: f64, hi: f64) -> f64 {
        let d = self.freqs[1] - self.freqs[0];
        self.freqs
            .iter()
            .zip(&self.power)
            .filter(|(w, _)| **w >= lo && **w <= hi)
            .map(|(_, p)| p * d)
            .sum()
    }
}
