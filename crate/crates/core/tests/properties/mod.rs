//! Invariant checks shared by the property test target and the acceptance run.
//! Each check returns a short detail string, as `Err` when the invariant fails.

#![allow(dead_code)]

use sedsim::phase_space::{
    evolve_wigner, evolve_wigner_observed, expectation, max_stable_dt, min_jump_ratio, moyal_rhs,
    steps_for, Axis, EdgeClosure, HamiltonianSpec, MoyalOrder, PhasePolynomial, WignerGrid,
};
use sedsim::quantum_oracle::{
    oscillator_ground_oracle, quartic_ground_oracle, rotate_gaussian, vacuum_wigner_mode,
    GaussianWignerParams,
};
use sedsim::sed_dynamics::{
    integrate_trajectory, realization_for, run_ensemble, EnsembleStats, IntegratorSettings,
    ParticleState, RadiationReaction, SedConfig,
};
use sedsim::zpf_field::{
    bin_spectrum, boost_samples, build_mode_set, draw_power_law_modes, sample_vacuum_amplitudes,
    sample_vacuum_amplitudes_in_stream, FrequencyStrategy, BOOST_ANALYSIS_BAND,
};
use sedsim::{PotentialSpec, UnitSystem};

pub type Outcome = Result<String, String>;

pub struct Property {
    pub module: &'static str,
    pub name: &'static str,
    pub check: fn() -> Outcome,
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn units() -> UnitSystem {
    UnitSystem::reduced(0.01).unwrap()
}

/// Everything that needs no precomputed ensemble.
pub fn standalone() -> Vec<Property> {
    vec![
        Property {
            module: "zpf_field",
            name: "amplitude statistics",
            check: amplitude_statistics,
        },
        Property {
            module: "zpf_field",
            name: "energy bookkeeping",
            check: energy_bookkeeping,
        },
        Property {
            module: "zpf_field",
            name: "field stationarity",
            check: field_stationarity,
        },
        Property {
            module: "zpf_field",
            name: "sampling determinism",
            check: sampling_determinism,
        },
        Property {
            module: "zpf_field",
            name: "boost self-consistency",
            check: boost_round_trip,
        },
        Property {
            module: "sed_dynamics",
            name: "decoupled-limit energy",
            check: decoupled_energy,
        },
        Property {
            module: "sed_dynamics",
            name: "linearity",
            check: linearity,
        },
        Property {
            module: "sed_dynamics",
            name: "ensemble determinism",
            check: ensemble_determinism,
        },
        Property {
            module: "phase_space",
            name: "quadratic exactness",
            check: quadratic_exactness,
        },
        Property {
            module: "phase_space",
            name: "normalization conservation",
            check: normalization_conservation,
        },
        Property {
            module: "phase_space",
            name: "free-particle means",
            check: free_particle_means,
        },
        Property {
            module: "phase_space",
            name: "min W continuity",
            check: min_w_continuity,
        },
        Property {
            module: "phase_space",
            name: "grid refinement",
            check: grid_refinement,
        },
        Property {
            module: "phase_space",
            name: "partition independence",
            check: partition_independence,
        },
        Property {
            module: "quantum_oracle",
            name: "purity saturation",
            check: purity_saturation,
        },
        Property {
            module: "quantum_oracle",
            name: "symplectic area",
            check: symplectic_area,
        },
        Property {
            module: "quantum_oracle",
            name: "quartic virial",
            check: quartic_virial,
        },
    ]
}

pub fn amplitude_statistics() -> Outcome {
    let n = 100_000;
    let set = build_mode_set(0.2, 5.0, n, &units(), FrequencyStrategy::Uniform).unwrap();
    let r = sample_vacuum_amplitudes(&set, 99);
    let a: Vec<(f64, f64)> = (0..n).map(|l| r.complex_amplitude(l)).collect();
    let nf = n as f64;
    let var_re = a.iter().map(|z| z.0 * z.0).sum::<f64>() / nf;
    let var_im = a.iter().map(|z| z.1 * z.1).sum::<f64>() / nf;
    let cross = a.iter().map(|z| z.0 * z.1).sum::<f64>() / nf;
    let neighbour = a.windows(2).map(|w| w[0].0 * w[1].0).sum::<f64>() / (nf - 1.0);
    // For a centered normal with variance s, the estimator of s has std s*sqrt(2/n);
    // a product of independent ones has std s/sqrt(n).
    let se_var = 0.25 * (2.0 / nf).sqrt();
    let se_prod = 0.25 / nf.sqrt();
    let ok = (var_re - 0.25).abs() < 4.0 * se_var
        && (var_im - 0.25).abs() < 4.0 * se_var
        && cross.abs() < 4.0 * se_prod
        && neighbour.abs() < 4.0 * se_prod;
    verdict(ok, format!("var(Re a) {var_re:.5}, var(Im a) {var_im:.5}, <Re Im> {cross:.2e}, <Re a_l Re a_l+1> {neighbour:.2e}"))
}

pub fn energy_bookkeeping() -> Outcome {
    let set = build_mode_set(0.2, 5.0, 64, &units(), FrequencyStrategy::Uniform).unwrap();
    let expected: f64 = set.modes().iter().map(|m| 0.5 * m.omega).sum();
    let totals: Vec<f64> = (0..4000u64)
        .map(|s| sample_vacuum_amplitudes_in_stream(&set, 7, s).total_energy(1.0))
        .collect();
    let mean = sedsim::stats::mean(&totals);
    let se = (sedsim::stats::sample_variance(&totals) / totals.len() as f64).sqrt();
    verdict(
        (mean - expected).abs() < 4.0 * se,
        format!("mean {mean:.4} vs {expected:.4} (se {se:.4})"),
    )
}

pub fn field_stationarity() -> Outcome {
    let set = build_mode_set(0.2, 5.0, 64, &units(), FrequencyStrategy::Uniform).unwrap();
    let expected = set.band_power();
    let n = 4000u64;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for t in [0.0, 7.3, 1000.0] {
        let f2: Vec<f64> = (0..n)
            .map(|s| {
                sample_vacuum_amplitudes_in_stream(&set, 11, s)
                    .eval_field(t)
                    .powi(2)
            })
            .collect();
        let mean = sedsim::stats::mean(&f2);
        let se = (sedsim::stats::sample_variance(&f2) / n as f64).sqrt();
        worst = worst.max((mean - expected).abs() / se);
        parts.push(format!("t={t}: {:.4}", mean / expected));
    }
    verdict(
        worst < 4.0,
        format!(
            "var F / band power {}, worst {worst:.2} se",
            parts.join(", ")
        ),
    )
}

pub fn sampling_determinism() -> Outcome {
    let config = SedConfig::harmonic_default(units());
    let a = realization_for(&config, 5, 17).unwrap();
    let b = realization_for(&config, 5, 17).unwrap();
    let c = realization_for(&config, 6, 17).unwrap();
    let same = a == b && a.eval_field(12.5).to_bits() == b.eval_field(12.5).to_bits();
    verdict(
        same && a != c,
        format!("rebuild identical: {same}, reseed differs: {}", a != c),
    )
}

pub fn boost_round_trip() -> Outcome {
    let n = 1_000_000;
    let base = draw_power_law_modes(3.0, n, 21);
    let once = boost_samples(&base, 0.3);
    let back = boost_samples(&once, -0.3);
    let bins0 = bin_spectrum(&base, 12, BOOST_ANALYSIS_BAND);
    let bins2 = bin_spectrum(&back, 12, BOOST_ANALYSIS_BAND);
    let binc = bin_spectrum(&once, 12, BOOST_ANALYSIS_BAND);
    // Single-boost error: each bin's relative count noise, 1/sqrt(samples in the bin).
    let width = BOOST_ANALYSIS_BAND.1 - BOOST_ANALYSIS_BAND.0;
    let mut worst = 0.0f64;
    for ((b0, b2), bc) in bins0.iter().zip(&bins2).zip(&binc) {
        let count = b0.density * (b0.omega_hi - b0.omega_lo) / width * n as f64;
        let mc = b0.density / count.max(1.0).sqrt();
        let _ = bc;
        worst = worst.max((b2.density - b0.density).abs() / mc);
    }
    verdict(
        worst < 2.0,
        format!("largest bin change {worst:.2e} single-boost errors"),
    )
}

pub fn decoupled_energy() -> Outcome {
    let period = 2.0 * std::f64::consts::PI;
    let settings = IntegratorSettings {
        units: units(),
        potential: PotentialSpec::harmonic(1.0, 1.0),
        rr_model: RadiationReaction::None,
        dt: 0.01 * period,
        t_end: 20.0 * period,
        stride: 100,
    };
    let traj = integrate_trajectory(&settings, None, ParticleState::new(1.0, 0.3)).unwrap();
    let e0 = traj.states[0].energy(&settings.potential, 1.0);
    let worst = traj
        .states
        .windows(2)
        .map(|w| {
            (w[1].energy(&settings.potential, 1.0) - w[0].energy(&settings.potential, 1.0)).abs()
                / e0
        })
        .fold(0.0, f64::max);
    verdict(
        worst < 1e-6,
        format!("largest relative drift per period {worst:.2e}"),
    )
}

pub fn linearity() -> Outcome {
    let mut config = SedConfig::harmonic_default(UnitSystem::reduced(0.05).unwrap());
    config.n_modes = 64;
    config.t_burn = 100.0;
    config.t_end = 200.0;
    let field = realization_for(&config, 3, 0).unwrap();
    let settings = config.integrator_settings();
    let start = ParticleState::new(0.0, 0.0);
    let single = integrate_trajectory(&settings, Some(&field), start).unwrap();
    let double = integrate_trajectory(&settings, Some(&field.scaled(2.0)), start).unwrap();
    let std_of = |t: &sedsim::sed_dynamics::Trajectory| {
        let xs: Vec<f64> = t
            .states
            .iter()
            .filter(|s| s.t >= config.t_burn)
            .map(|s| s.x)
            .collect();
        sedsim::stats::sample_variance(&xs).sqrt()
    };
    let ratio = std_of(&double) / std_of(&single);
    verdict((ratio - 2.0).abs() < 1e-9, format!("std ratio {ratio:.12}"))
}

fn small_ensemble(workers: usize, seed: u64) -> EnsembleStats {
    let mut config = SedConfig::harmonic_default(UnitSystem::reduced(0.05).unwrap());
    config.n_modes = 48;
    config.t_burn = 100.0;
    config.t_end = 200.0;
    config.n_trajectories = 12;
    config.workers = workers;
    run_ensemble(&config, seed).unwrap()
}

pub fn ensemble_determinism() -> Outcome {
    let one = small_ensemble(1, 8);
    let three = small_ensemble(3, 8);
    let other = small_ensemble(3, 9);
    verdict(
        one == three && one != other,
        format!(
            "1 vs 3 workers identical: {}, reseeded differs: {}",
            one == three,
            one != other
        ),
    )
}

/// Halves of the stationary window agree within two standard errors of
/// their paired difference.
pub fn sed_stationarity(stats: &EnsembleStats) -> Outcome {
    let d = &stats.half_drift;
    let zs = [d.mean_x, d.var_x, d.var_p, d.mean_energy].map(|e| e.value.abs() / e.stderr);
    let worst = zs.iter().copied().fold(0.0, f64::max);
    verdict(worst < 2.0, format!("half-window z-scores {:.2?}", zs))
}

pub fn sed_virial(stats: &EnsembleStats) -> Outcome {
    let u = stats.units;
    let kinetic = stats.var_p.value / u.mass;
    let potential = u.mass * u.omega0 * u.omega0 * stats.var_x.value;
    let rel = (kinetic / potential - 1.0).abs();
    verdict(
        rel < 0.1,
        format!("var_p/m over m w0^2 var_x = {:.4}", kinetic / potential),
    )
}

fn random_like_grid(n: usize) -> WignerGrid {
    let axis = Axis::new(-4.0, 4.0, n).unwrap();
    WignerGrid::from_fn(axis, axis, |x, p| {
        (-(x * x + p * p)).exp() * (1.0 + 0.3 * (3.1 * x + 1.7 * p).sin() + 0.2 * (x * p).cos())
    })
}

pub fn quadratic_exactness() -> Outcome {
    let w = random_like_grid(61);
    let ham =
        HamiltonianSpec::new(1.7, PotentialSpec::new(vec![0.4, -0.3, 1.1]).unwrap(), 0.8).unwrap();
    let r0 = moyal_rhs(&w, &ham, MoyalOrder::LIOUVILLE).unwrap();
    let identical = (1..=MoyalOrder::MAX).all(|n| {
        let rn = moyal_rhs(&w, &ham, MoyalOrder::new(n).unwrap()).unwrap();
        r0.values()
            .iter()
            .zip(rn.values())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    });
    verdict(
        identical,
        format!("orders 1..=3 bitwise equal to order 0: {identical}"),
    )
}

fn quartic_run() -> (WignerGrid, sedsim::phase_space::WignerEvolution) {
    let xa = Axis::new(-3.5, 3.5, 71).unwrap();
    let pa = Axis::new(-7.0, 7.0, 71).unwrap();
    let w0 = WignerGrid::gaussian(
        xa,
        pa,
        &GaussianWignerParams::centered(0.2, 0.5).displaced(0.5, 0.0),
    )
    .unwrap();
    let ham = HamiltonianSpec::new(1.0, PotentialSpec::quartic(0.25), 0.4).unwrap();
    let order = MoyalOrder::new(1).unwrap();
    let (dt, n) = steps_for(1.0, max_stable_dt(&w0, &ham, order));
    let out = evolve_wigner(&w0, &ham, order, dt, n).unwrap();
    (w0, out)
}

pub fn normalization_conservation() -> Outcome {
    let (_, out) = quartic_run();
    let err = (out.final_total - 1.0).abs();
    verdict(
        err < 1e-5,
        format!("|integral W - 1| = {err:.2e} after {} steps", out.n_steps),
    )
}

pub fn min_w_continuity() -> Outcome {
    let (_, out) = quartic_run();
    let ratio = min_jump_ratio(&out.min_history);
    verdict(
        ratio <= 10.0,
        format!(
            "largest min-W jump {ratio:.2} x typical, final min {:.2e}",
            out.grid.min_value()
        ),
    )
}

pub fn free_particle_means() -> Outcome {
    let params = GaussianWignerParams::centered(0.3, 0.2).displaced(-0.5, 0.7);
    let xa = Axis::new(-6.0, 6.0, 121).unwrap();
    let pa = Axis::new(-4.0, 4.0, 81).unwrap();
    let w0 = WignerGrid::gaussian(xa, pa, &params).unwrap();
    let ham = HamiltonianSpec::new(1.5, PotentialSpec::free(), 1.0).unwrap();
    let (dt, n) = steps_for(2.0, max_stable_dt(&w0, &ham, MoyalOrder::LIOUVILLE));
    let out = evolve_wigner(&w0, &ham, MoyalOrder::LIOUVILLE, dt, n).unwrap();
    let mean = |a, b| expectation(&out.grid, &PhasePolynomial::monomial(a, b).unwrap());
    let (dp, dx) = (
        (mean(0, 1) - 0.7).abs(),
        (mean(1, 0) - (-0.5 + 0.7 * 2.0 / 1.5)).abs(),
    );
    verdict(
        dp < 1e-6 && dx < 1e-4,
        format!("<p> error {dp:.1e}, <x> error {dx:.1e}"),
    )
}

fn relative_changes(
    coarse: &WignerGrid,
    fine: &WignerGrid,
    observables: &[PhasePolynomial],
) -> f64 {
    observables
        .iter()
        .map(|o| {
            let (a, b) = (expectation(coarse, o), expectation(fine, o));
            (a - b).abs() / b.abs()
        })
        .fold(0.0, f64::max)
}

pub fn grid_refinement() -> Outcome {
    let observables: Vec<PhasePolynomial> = [(2, 0), (0, 2), (4, 0), (2, 2)]
        .iter()
        .map(|&(a, b)| PhasePolynomial::monomial(a, b).unwrap())
        .collect();

    let closure = |n: usize| {
        let axis = Axis::new(-6.0, 6.0, n).unwrap();
        let w0 = WignerGrid::gaussian(
            axis,
            axis,
            &oscillator_ground_oracle(1.0, 1.0, 1.0).displaced(1.0, 0.0),
        )
        .unwrap();
        let ham = HamiltonianSpec::new(1.0, PotentialSpec::harmonic(1.0, 1.0), 1.0).unwrap();
        let (dt, steps) = steps_for(
            2.0 * std::f64::consts::PI,
            max_stable_dt(&w0, &ham, MoyalOrder::LIOUVILLE),
        );
        evolve_wigner(&w0, &ham, MoyalOrder::LIOUVILLE, dt, steps)
            .unwrap()
            .grid
    };
    let harmonic = relative_changes(&closure(128), &closure(255), &observables);

    let quartic = |factor: usize| {
        let xa = Axis::new(-3.5, 3.5, 141).unwrap().refined(factor);
        let pa = Axis::new(-7.0, 7.0, 141).unwrap().refined(factor);
        let w0 = WignerGrid::gaussian(
            xa,
            pa,
            &GaussianWignerParams::centered(0.2, 0.5).displaced(0.5, 0.0),
        )
        .unwrap();
        let ham = HamiltonianSpec::new(1.0, PotentialSpec::quartic(0.25), 0.4).unwrap();
        let order = MoyalOrder::new(1).unwrap();
        let (dt, n) = steps_for(1.0, max_stable_dt(&w0, &ham, order));
        evolve_wigner(&w0, &ham, order, dt, n).unwrap().grid
    };
    let anharmonic = relative_changes(&quartic(1), &quartic(2), &observables);
    let worst = harmonic.max(anharmonic);
    verdict(
        worst < 1e-3,
        format!("largest relative change of <x2>,<p2>,<x4>,<x2p2>: harmonic {harmonic:.1e}, quartic {anharmonic:.1e}"),
    )
}

pub fn partition_independence() -> Outcome {
    let axis = Axis::new(-5.0, 5.0, 101).unwrap();
    let w0 = WignerGrid::gaussian(
        axis,
        axis,
        &GaussianWignerParams::centered(0.3, 0.4).displaced(0.4, -0.2),
    )
    .unwrap();
    let ham = HamiltonianSpec::new(1.0, PotentialSpec::quartic(0.25), 0.5).unwrap();
    let order = MoyalOrder::new(1).unwrap();
    let (dt, n) = steps_for(0.2, max_stable_dt(&w0, &ham, order));
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                evolve_wigner_observed(&w0, &ham, order, dt, n, EdgeClosure::default(), |_, _| {})
                    .unwrap()
                    .grid
            })
    };
    let same = run(1) == run(4);
    verdict(same, format!("1 vs 4 threads bitwise equal: {same}"))
}

pub fn purity_saturation() -> Outcome {
    let mut worst = 0.0f64;
    for &(m, w, h) in &[(1.0, 1.0, 1.0), (2.5, 0.3, 0.7), (0.4, 3.0, 0.05)] {
        let g = oscillator_ground_oracle(m, w, h);
        worst = worst.max((g.determinant() - 0.25 * h * h).abs());
        let v = vacuum_wigner_mode(w, h);
        worst = worst.max((v.determinant() - 0.25 * h * h).abs());
    }
    verdict(
        worst < 1e-12,
        format!("largest |det - (hbar/2)^2| = {worst:.1e}"),
    )
}

pub fn symplectic_area() -> Outcome {
    let g = GaussianWignerParams {
        mean_x: 0.3,
        mean_p: -1.0,
        var_x: 0.8,
        var_p: 0.6,
        cov_xp: 0.2,
    };
    let worst = [0.1, 1.0, 2.7, 13.0]
        .iter()
        .map(|&t| (rotate_gaussian(&g, 1.3, 0.7, t).determinant() - g.determinant()).abs())
        .fold(0.0, f64::max);
    verdict(
        worst < 1e-12,
        format!("largest determinant change {worst:.1e}"),
    )
}

pub fn quartic_virial() -> Outcome {
    let lambda = 0.25;
    let ground = quartic_ground_oracle(lambda, 1.0, 80).unwrap();
    let two_t = ground.var_p;
    let four_v = 4.0 * lambda * ground.mean_x4;
    verdict(
        (two_t - four_v).abs() < 1e-6,
        format!("2<T> = {two_t:.9}, 4<V> = {four_v:.9}"),
    )
}
