use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{InitialCondition, SedConfig};
use super::integrator::{integrate_trajectory, integrate_with, ParticleState, Trajectory};
use crate::error::{Result, SimError};
use crate::rng::{CounterRng, Purpose};
use crate::stats::{mean, sample_variance, CompensatedSum};
use crate::units::UnitSystem;
use crate::zpf_field::{
    build_mode_set, sample_vacuum_amplitudes_in_stream, FieldRealization, FrequencyStrategy,
};

/// Value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Second moments over one sub-window of the stationary period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub t_start: f64,
    pub t_stop: f64,
    pub mean_x: Estimate,
    pub var_x: Estimate,
    pub var_p: Estimate,
    pub mean_energy: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub units: UnitSystem,
    pub mean_x: Estimate,
    pub mean_p: Estimate,
    pub var_x: Estimate,
    pub var_p: Estimate,
    pub mean_energy: Estimate,
    pub n_trajectories: usize,
    /// Samples per trajectory inside the stationary window.
    pub samples_per_trajectory: usize,
    /// `var_x / stderr(mean_x)^2`: independent samples the ensemble is worth.
    pub n_effective_samples: f64,
    pub failed_trajectories: Vec<usize>,
    pub first_half: WindowEstimate,
    pub second_half: WindowEstimate,
    /// Second half minus first half, with errors from the per-trajectory
    /// differences. Both halves of a trajectory share one field realization,
    /// so they are correlated and their separate errors do not combine.
    pub half_drift: HalfDrift,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfDrift {
    pub mean_x: Estimate,
    pub var_x: Estimate,
    pub var_p: Estimate,
    pub mean_energy: Estimate,
}

/// Per-trajectory sums over a window.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    x: CompensatedSum,
    p: CompensatedSum,
    x2: CompensatedSum,
    p2: CompensatedSum,
    energy: CompensatedSum,
}

impl Moments {
    fn add(&mut self, s: &ParticleState, energy: f64) {
        self.n += 1;
        self.x.add(s.x);
        self.p.add(s.p);
        self.x2.add(s.x * s.x);
        self.p2.add(s.p * s.p);
        self.energy.add(energy);
    }

    fn means(&self) -> [f64; 5] {
        let n = self.n as f64;
        [
            self.x.value() / n,
            self.p.value() / n,
            self.x2.value() / n,
            self.p2.value() / n,
            self.energy.value() / n,
        ]
    }
}

struct TrajectoryMoments {
    full: Moments,
    halves: [Moments; 2],
}

/// Field realization of trajectory `k`: fresh jitter and amplitudes keyed by `(master_seed, k)`.
pub fn realization_for(config: &SedConfig, master_seed: u64, k: usize) -> Result<FieldRealization> {
    let strategy = if config.jitter {
        FrequencyStrategy::StratifiedJitter {
            seed: master_seed,
            stream: k as u64,
        }
    } else {
        FrequencyStrategy::Uniform
    };
    let set = build_mode_set(
        config.omega_min,
        config.omega_max,
        config.n_modes,
        &config.units,
        strategy,
    )?;
    Ok(sample_vacuum_amplitudes_in_stream(
        &set,
        master_seed,
        k as u64,
    ))
}

fn initial_state(config: &SedConfig, master_seed: u64, k: usize) -> ParticleState {
    match config.init {
        InitialCondition::Fixed { x0, p0 } => ParticleState::new(x0, p0),
        InitialCondition::Wigner(g) => {
            let (z1, z2) = CounterRng::new(master_seed, Purpose::Initial, k as u64).normal_pair();
            let (x, p) = g.sample_from_normals(z1, z2);
            ParticleState::new(x, p)
        }
    }
}

/// Full recorded trajectory `k` of the ensemble defined by `(config, master_seed)`.
pub fn ensemble_trajectory(config: &SedConfig, master_seed: u64, k: usize) -> Result<Trajectory> {
    let field = realization_for(config, master_seed, k)?;
    integrate_trajectory(
        &config.integrator_settings(),
        Some(&field),
        initial_state(config, master_seed, k),
    )
}

fn run_one(config: &SedConfig, master_seed: u64, k: usize) -> Result<TrajectoryMoments> {
    let field = realization_for(config, master_seed, k)?;
    let settings = config.integrator_settings();
    let mass = config.units.mass;
    let t_mid = 0.5 * (config.t_burn + config.t_end);
    let mut out = TrajectoryMoments {
        full: Moments::default(),
        halves: [Moments::default(); 2],
    };
    integrate_with(
        &settings,
        Some(&field),
        initial_state(config, master_seed, k),
        |_, s| {
            if s.t < config.t_burn {
                return;
            }
            let e = s.energy(&config.potential, mass);
            out.full.add(s, e);
            out.halves[usize::from(s.t >= t_mid)].add(s, e);
        },
    )
    .map_err(|e| match e {
        SimError::IntegrationBlowup { time, .. } => SimError::IntegrationBlowup {
            time,
            trajectory: Some(k),
        },
        other => other,
    })?;
    Ok(out)
}

struct Summary {
    mean_x: Estimate,
    mean_p: Estimate,
    var_x: Estimate,
    var_p: Estimate,
    mean_energy: Estimate,
}

/// Ensemble estimates from per-trajectory window means. Standard errors come
/// from the spread between trajectories, which are independent.
fn summarize(per_traj: &[[f64; 5]]) -> Summary {
    let k = per_traj.len() as f64;
    let col = |i: usize| -> Vec<f64> { per_traj.iter().map(|m| m[i]).collect() };
    let (xs, ps, x2s, p2s, es) = (col(0), col(1), col(2), col(3), col(4));
    let (mx, mp) = (mean(&xs), mean(&ps));
    let se = |v: &[f64]| (sample_variance(v) / k).sqrt();
    // Linearized per-trajectory contributions to the pooled variances.
    let lin_x: Vec<f64> = x2s.iter().zip(&xs).map(|(a, b)| a - 2.0 * mx * b).collect();
    let lin_p: Vec<f64> = p2s.iter().zip(&ps).map(|(a, b)| a - 2.0 * mp * b).collect();
    Summary {
        mean_x: Estimate {
            value: mx,
            stderr: se(&xs),
        },
        mean_p: Estimate {
            value: mp,
            stderr: se(&ps),
        },
        var_x: Estimate {
            value: mean(&x2s) - mx * mx,
            stderr: se(&lin_x),
        },
        var_p: Estimate {
            value: mean(&p2s) - mp * mp,
            stderr: se(&lin_p),
        },
        mean_energy: Estimate {
            value: mean(&es),
            stderr: se(&es),
        },
    }
}

fn half_drift(first: &[[f64; 5]], second: &[[f64; 5]]) -> HalfDrift {
    let k = first.len() as f64;
    let column_mean = |rows: &[[f64; 5]], i: usize| rows.iter().map(|m| m[i]).sum::<f64>() / k;
    let (mx1, mp1, mx2, mp2) = (
        column_mean(first, 0),
        column_mean(first, 1),
        column_mean(second, 0),
        column_mean(second, 1),
    );
    let paired = |f: &dyn Fn(&[f64; 5], f64, f64) -> f64, value: f64| {
        let d: Vec<f64> = first
            .iter()
            .zip(second)
            .map(|(a, b)| f(b, mx2, mp2) - f(a, mx1, mp1))
            .collect();
        Estimate {
            value,
            stderr: (sample_variance(&d) / k).sqrt(),
        }
    };
    let (s1, s2) = (summarize(first), summarize(second));
    HalfDrift {
        mean_x: paired(&|m, _, _| m[0], s2.mean_x.value - s1.mean_x.value),
        var_x: paired(
            &|m, mx, _| m[2] - 2.0 * mx * m[0],
            s2.var_x.value - s1.var_x.value,
        ),
        var_p: paired(
            &|m, _, mp| m[3] - 2.0 * mp * m[1],
            s2.var_p.value - s1.var_p.value,
        ),
        mean_energy: paired(&|m, _, _| m[4], s2.mean_energy.value - s1.mean_energy.value),
    }
}

/// Run `n_trajectories` independent SED trajectories and collect stationary moments.
///
/// Trajectory `k` is a pure function of `(config, master_seed, k)`; results are
/// gathered in index order before reduction, so the output does not depend on
/// the number of workers.
pub fn run_ensemble(config: &SedConfig, master_seed: u64) -> Result<EnsembleStats> {
    config.validate()?;
    let n = config.n_trajectories;
    let work = || -> Vec<Result<TrajectoryMoments>> {
        (0..n)
            .into_par_iter()
            .map(|k| run_one(config, master_seed, k))
            .collect()
    };
    let results = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| SimError::Config(format!("thread pool: {e}")))?
            .install(work)
    } else {
        work()
    };

    let mut failed = Vec::new();
    let mut first_failure = None;
    let mut moments = Vec::with_capacity(n);
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(m) => moments.push(m),
            Err(SimError::IntegrationBlowup { time, .. }) => {
                failed.push(k);
                first_failure.get_or_insert((k, time));
            }
            Err(other) => return Err(other),
        }
    }
    if failed.len() * 100 > n || moments.len() < 2 {
        let (first_index, first_time) = first_failure.unwrap_or((0, f64::NAN));
        return Err(SimError::EnsembleAborted {
            failed: failed.len(),
            total: n,
            first_index,
            first_time,
        });
    }

    let samples_per_trajectory = moments[0].full.n;
    if samples_per_trajectory == 0 {
        return Err(SimError::Config(
            "stationary window contains no samples".into(),
        ));
    }
    let full: Vec<[f64; 5]> = moments.iter().map(|m| m.full.means()).collect();
    let s = summarize(&full);

    let t_mid = 0.5 * (config.t_burn + config.t_end);
    let halves: [Vec<[f64; 5]>; 2] =
        [0, 1].map(|i| moments.iter().map(|m| m.halves[i].means()).collect());
    let window = |i: usize, t_start: f64, t_stop: f64| {
        let w = summarize(&halves[i]);
        WindowEstimate {
            t_start,
            t_stop,
            mean_x: w.mean_x,
            var_x: w.var_x,
            var_p: w.var_p,
            mean_energy: w.mean_energy,
        }
    };

    Ok(EnsembleStats {
        units: config.units,
        n_effective_samples: s.var_x.value / (s.mean_x.stderr * s.mean_x.stderr),
        mean_x: s.mean_x,
        mean_p: s.mean_p,
        var_x: s.var_x,
        var_p: s.var_p,
        mean_energy: s.mean_energy,
        n_trajectories: moments.len(),
        samples_per_trajectory,
        failed_trajectories: failed,
        first_half: window(0, config.t_burn, t_mid),
        second_half: window(1, t_mid, config.t_end),
        half_drift: half_drift(&halves[0], &halves[1]),
    })
}
