use serde::Serialize;

use super::modes::ModeSet;
use crate::error::{config_err, Result};
use crate::rng::{CounterRng, Purpose};
use crate::trig::sin_cos;

const LANES: usize = 4;

/// One sampled realization of the zero-point field: a mode set plus a pair of
/// standard-normal quadratures `(u_l, v_l)` per mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldRealization {
    mode_set: ModeSet,
    amplitudes: Vec<(f64, f64)>,
    seed: u64,
    stream: u64,
    #[serde(skip)]
    kernel: FieldKernel,
}

/// Structure-of-arrays copy of the mode sum: `w_l`, `h_l u_l`, `h_l v_l`.
#[derive(Debug, Clone, PartialEq, Default)]
struct FieldKernel {
    omega: Vec<f64>,
    hu: Vec<f64>,
    hv: Vec<f64>,
}

impl FieldKernel {
    fn new(mode_set: &ModeSet, amplitudes: &[(f64, f64)]) -> Self {
        let modes = mode_set.modes();
        FieldKernel {
            omega: modes.iter().map(|m| m.omega).collect(),
            hu: modes
                .iter()
                .zip(amplitudes)
                .map(|(m, a)| m.weight * a.0)
                .collect(),
            hv: modes
                .iter()
                .zip(amplitudes)
                .map(|(m, a)| m.weight * a.1)
                .collect(),
        }
    }
}

pub fn sample_vacuum_amplitudes(mode_set: &ModeSet, seed: u64) -> FieldRealization {
    sample_vacuum_amplitudes_in_stream(mode_set, seed, 0)
}

/// Amplitudes for mode `l` are the `l`-th normal pair of stream `(seed, stream)`.
pub fn sample_vacuum_amplitudes_in_stream(
    mode_set: &ModeSet,
    seed: u64,
    stream: u64,
) -> FieldRealization {
    let mut rng = CounterRng::new(seed, Purpose::Amplitudes, stream);
    let amplitudes: Vec<(f64, f64)> = (0..mode_set.n_modes()).map(|_| rng.normal_pair()).collect();
    FieldRealization {
        kernel: FieldKernel::new(mode_set, &amplitudes),
        mode_set: mode_set.clone(),
        amplitudes,
        seed,
        stream,
    }
}

impl FieldRealization {
    pub fn from_parts(
        mode_set: ModeSet,
        amplitudes: Vec<(f64, f64)>,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        if amplitudes.len() != mode_set.n_modes() {
            return config_err(format!(
                "{} amplitude pairs for {} modes",
                amplitudes.len(),
                mode_set.n_modes()
            ));
        }
        if amplitudes
            .iter()
            .any(|(u, v)| !u.is_finite() || !v.is_finite())
        {
            return config_err("amplitudes must be finite");
        }
        Ok(FieldRealization {
            kernel: FieldKernel::new(&mode_set, &amplitudes),
            mode_set,
            amplitudes,
            seed,
            stream,
        })
    }

    pub fn mode_set(&self) -> &ModeSet {
        &self.mode_set
    }

    pub fn amplitudes(&self) -> &[(f64, f64)] {
        &self.amplitudes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Complex amplitude `a_l = (u_l + i v_l) / 2` as `(Re, Im)`.
    pub fn complex_amplitude(&self, l: usize) -> (f64, f64) {
        let (u, v) = self.amplitudes[l];
        (0.5 * u, 0.5 * v)
    }

    /// Oscillator-like field coordinates `(y_l, q_l)`.
    pub fn quadratures(&self, l: usize, hbar: f64) -> (f64, f64) {
        let omega = self.mode_set.modes()[l].omega;
        let (re, im) = self.complex_amplitude(l);
        (
            (2.0 * hbar / omega).sqrt() * re,
            (2.0 * hbar * omega).sqrt() * im,
        )
    }

    /// `hbar w_l |a_l|^2`.
    pub fn mode_energy(&self, l: usize, hbar: f64) -> f64 {
        let (re, im) = self.complex_amplitude(l);
        hbar * self.mode_set.modes()[l].omega * (re * re + im * im)
    }

    /// Field energy summed over modes.
    pub fn total_energy(&self, hbar: f64) -> f64 {
        (0..self.amplitudes.len())
            .map(|l| self.mode_energy(l, hbar))
            .sum()
    }

    /// Force `F(t) = sum_l h_l (u_l cos w_l t + v_l sin w_l t)`.
    ///
    /// Mode `l` is accumulated into partial sum `l % 4`; the four partial sums
    /// are then added pairwise. Every evaluation uses this same order.
    pub fn eval_field(&self, t: f64) -> f64 {
        let k = &self.kernel;
        let mut lanes = [0.0; LANES];
        let n_full = k.omega.len() / LANES * LANES;
        for ((om, hu), hv) in k.omega[..n_full]
            .chunks_exact(LANES)
            .zip(k.hu[..n_full].chunks_exact(LANES))
            .zip(k.hv[..n_full].chunks_exact(LANES))
        {
            for j in 0..LANES {
                let (s, c) = sin_cos(om[j] * t);
                lanes[j] += hu[j] * c + hv[j] * s;
            }
        }
        for l in n_full..k.omega.len() {
            let (s, c) = sin_cos(k.omega[l] * t);
            lanes[l - n_full] += k.hu[l] * c + k.hv[l] * s;
        }
        (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])
    }

    /// `F(t0 + k dt)` for `k = 0..n_steps`, identical to [`eval_field`](Self::eval_field).
    pub fn eval_field_grid(&self, t0: f64, dt: f64, n_steps: usize) -> Result<Vec<f64>> {
        let limit = std::f64::consts::PI / self.mode_set.highest_omega();
        if !(dt > 0.0 && dt < limit) {
            return config_err(format!(
                "field sampling step {dt} must lie in (0, pi/omega_max = {limit})"
            ));
        }
        Ok((0..n_steps)
            .map(|k| self.eval_field(t0 + k as f64 * dt))
            .collect())
    }

    /// Same realization with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> FieldRealization {
        let mode_set = self.mode_set.scaled(factor);
        FieldRealization {
            kernel: FieldKernel::new(&mode_set, &self.amplitudes),
            mode_set,
            amplitudes: self.amplitudes.clone(),
            seed: self.seed,
            stream: self.stream,
        }
    }
}
