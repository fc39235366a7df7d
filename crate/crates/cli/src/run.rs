use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use sedsim::phase_space::{
    evolve_wigner, expectation, hbar_scaling_study, marginal, max_stable_dt, steps_for,
    write_grid_binary, write_grid_csv, HamiltonianSpec, PhaseAxis, PhasePolynomial, WignerGrid,
};
use sedsim::quantum_oracle::{anharmonic_ground_oracle, oscillator_ground_oracle};
use sedsim::sed_dynamics::{
    ensemble_trajectory, run_ensemble, stationary_report, write_trajectory_csv, OracleMoments,
    SedConfig,
};
use sedsim::zpf_field::{
    boost_spectrum_check, build_mode_set, estimate_spectrum, sample_vacuum_amplitudes,
    write_boost_csv, write_periodogram_csv, write_realization_csv, FrequencyStrategy,
};
use sedsim::SimError;
use serde::Serialize;
use serde_json::json;

use crate::config::{
    ComparePlan, FieldPlan, LorentzPlan, Plan, RunConfig, ScalingPlan, SedPlan, WignerPlan,
};
use crate::error::CliError;
use crate::output::StagedDir;

pub const MANIFEST: &str = "manifest.json";

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: String,
    code_version: String,
    master_seed: u64,
    config: &'a std::collections::BTreeMap<String, String>,
    plan: &'a Plan,
    outputs: Vec<String>,
    started_unix_seconds: u64,
    wall_time_seconds: f64,
}

/// Runs the experiment and moves its outputs into `config.out_dir`.
pub fn run(config: &RunConfig) -> Result<PathBuf, CliError> {
    let clock = Instant::now();
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let dir = StagedDir::create(&config.out_dir)?;

    match &config.plan {
        Plan::SampleField(p) => sample_field(config, p, &dir)?,
        Plan::RunSed(p) => run_sed(config, p, &dir)?,
        Plan::EvolveWigner(p) => evolve(config, p, &dir)?,
        Plan::HbarScaling(p) => scaling(p, &dir)?,
        Plan::CheckLorentz(p) => lorentz(config, p, &dir)?,
        Plan::Compare(p) => compare(config, p, &dir)?,
    }
    dir.write_text("config.txt", &config.to_config_text())?;

    let mut outputs = dir.files()?;
    outputs.push(MANIFEST.to_string());
    outputs.sort();
    let manifest = Manifest {
        experiment: config.experiment.name().to_string(),
        code_version: format!("sedsim {}", env!("CARGO_PKG_VERSION")),
        master_seed: config.master_seed,
        config: &config.resolved,
        plan: &config.plan,
        outputs,
        started_unix_seconds: started,
        wall_time_seconds: clock.elapsed().as_secs_f64(),
    };
    dir.write_json(MANIFEST, &manifest)?;
    dir.commit()
}

fn sample_field(config: &RunConfig, p: &FieldPlan, dir: &StagedDir) -> Result<(), CliError> {
    let strategy = if p.jitter {
        FrequencyStrategy::StratifiedJitter {
            seed: config.master_seed,
            stream: 0,
        }
    } else {
        FrequencyStrategy::Uniform
    };
    let set = build_mode_set(p.omega_min, p.omega_max, p.n_modes, &config.units, strategy)?;
    let realization = sample_vacuum_amplitudes(&set, config.master_seed);
    write_realization_csv(&realization, dir.writer("realization.csv")?)?;

    let n = set.n_modes() as f64;
    let mean_abs_a2 = (0..set.n_modes())
        .map(|l| {
            let (re, im) = realization.complex_amplitude(l);
            re * re + im * im
        })
        .sum::<f64>()
        / n;
    let energy_ratio = (0..set.n_modes())
        .map(|l| {
            realization.mode_energy(l, config.units.hbar)
                / (0.5 * config.units.hbar * set.modes()[l].omega)
        })
        .sum::<f64>()
        / n;

    let periodogram = estimate_spectrum(&realization, p.duration, p.dt)?;
    write_periodogram_csv(&periodogram, dir.writer("periodogram.csv")?)?;
    dir.write_json_line(
        "periodogram.json",
        &json!({
            "n_modes": set.n_modes(),
            "band": [p.omega_min, p.omega_max],
            "fit_exponent": periodogram.fit_exponent,
            "fit_stderr": periodogram.fit_stderr,
            "fit_range": periodogram.fit_range,
            "n_segments": periodogram.n_segments,
            "mean_abs_a2": mean_abs_a2,
            "mean_energy_over_half_hbar_omega": energy_ratio,
        }),
    )
}

fn run_sed(config: &RunConfig, p: &SedPlan, dir: &StagedDir) -> Result<(), CliError> {
    let stats = run_ensemble(&p.sed, config.master_seed)?;
    dir.write_json(
        "ensemble_stats.json",
        &json!({ "config": config.resolved, "stats": stats }),
    )?;
    for k in 0..p.trajectory_dumps {
        let trajectory = ensemble_trajectory(&p.sed, config.master_seed, k)?;
        write_trajectory_csv(&trajectory, dir.writer(&format!("trajectory_{k}.csv"))?)?;
    }
    Ok(())
}

fn evolve(config: &RunConfig, p: &WignerPlan, dir: &StagedDir) -> Result<(), CliError> {
    let ham = HamiltonianSpec::new(config.units.mass, p.potential.clone(), config.units.hbar)?;
    let w0 = WignerGrid::gaussian(p.x_axis, p.p_axis, &p.initial)?;
    let (dt, n_steps) = match p.dt {
        Some(dt) => {
            let n = (p.t_final / dt).round().max(1.0) as usize;
            (p.t_final / n as f64, n)
        }
        None => steps_for(p.t_final, max_stable_dt(&w0, &ham, p.order)),
    };
    let result = evolve_wigner(&w0, &ham, p.order, dt, n_steps)?;
    let grid = &result.grid;
    write_grid_csv(grid, dir.writer("wigner_final.csv")?)?;
    write_grid_binary(grid, dir.writer("wigner_final.bin")?)?;

    let mut marginals = dir.writer("marginals.csv")?;
    let mx = marginal(grid, PhaseAxis::X);
    let mp = marginal(grid, PhaseAxis::P);
    {
        use std::io::Write;
        writeln!(marginals, "axis,coordinate,density")?;
        for (i, v) in mx.iter().enumerate() {
            writeln!(marginals, "x,{:?},{:?}", p.x_axis.point(i), v)?;
        }
        for (j, v) in mp.iter().enumerate() {
            writeln!(marginals, "p,{:?},{:?}", p.p_axis.point(j), v)?;
        }
        marginals.flush()?;
    }

    let moment = |a, b| PhasePolynomial::monomial(a, b).map(|obs| expectation(grid, &obs));
    let energy = PhasePolynomial::new(
        std::iter::once((0.5 / config.units.mass, 0, 2))
            .chain(
                p.potential
                    .coefficients()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| (*c, k as u32, 0)),
            )
            .collect(),
    )?;
    dir.write_json(
        "wigner_summary.json",
        &json!({
            "evolution": result.summary(),
            "t_final": p.t_final,
            "order": p.order.n_max(),
            "norm": expectation(grid, &PhasePolynomial::one()),
            "mean_x": moment(1, 0)?,
            "mean_p": moment(0, 1)?,
            "mean_x2": moment(2, 0)?,
            "mean_p2": moment(0, 2)?,
            "energy": expectation(grid, &energy),
        }),
    )
}

fn scaling(p: &ScalingPlan, dir: &StagedDir) -> Result<(), CliError> {
    let report = hbar_scaling_study(&p.potential, &p.hbar_list, p.t_final, &p.setup)?;
    let mut w = dir.writer("scaling.csv")?;
    {
        use std::io::Write;
        writeln!(w, "hbar,distance")?;
        for point in &report.points {
            writeln!(w, "{:?},{:?}", point.hbar, point.distance)?;
        }
        w.flush()?;
    }
    dir.write_json("scaling_report.json", &report)
}

fn lorentz(config: &RunConfig, p: &LorentzPlan, dir: &StagedDir) -> Result<(), CliError> {
    let report = boost_spectrum_check(p.exponent, p.beta, p.n_samples, config.master_seed)?;
    write_boost_csv(&report, dir.writer("boost_spectrum.csv")?)?;
    dir.write_json_line(
        "boost_report.json",
        &json!({
            "beta": report.beta,
            "spectral_exponent": report.spectral_exponent,
            "n_samples": report.n_samples,
            "exponent_before": report.exponent_before,
            "exponent_after": report.exponent_after,
            "exponent_stderr": report.exponent_stderr,
            "amplitude_ratio": report.amplitude_ratio,
            "directional_deviation": report.directional_deviation,
            "invariant": report.invariant,
        }),
    )
}

/// Quantum ground-state moments for the potentials the oracles cover.
pub fn oracle_for(sed: &SedConfig, basis: usize) -> Result<OracleMoments, CliError> {
    let units = sed.units;
    let c = sed.potential.coefficients();
    let coeff = |k: usize| c.get(k).copied().unwrap_or(0.0);
    let unsupported = || {
        CliError::Sim(SimError::Config(
            "no quantum oracle for this potential: need c0 + c2 x^2 + c4 x^4".into(),
        ))
    };
    if c.len() > 5 || coeff(1) != 0.0 || coeff(3) != 0.0 {
        return Err(unsupported());
    }
    if coeff(4) == 0.0 {
        if !(coeff(2) > 0.0) {
            return Err(unsupported());
        }
        let omega = (2.0 * coeff(2) / units.mass).sqrt();
        let g = oscillator_ground_oracle(units.mass, omega, units.hbar);
        return Ok(OracleMoments {
            hbar: units.hbar,
            mass: units.mass,
            var_x: g.var_x,
            var_p: g.var_p,
            mean_energy: g.harmonic_energy(units.mass, omega) + coeff(0),
        });
    }
    if units.mass != 1.0 {
        return Err(CliError::Sim(SimError::Config(
            "the anharmonic oracle assumes unit mass".into(),
        )));
    }
    let ground = anharmonic_ground_oracle(2.0 * coeff(2), coeff(4), units.hbar, basis)?;
    Ok(OracleMoments {
        hbar: units.hbar,
        mass: units.mass,
        var_x: ground.var_x,
        var_p: ground.var_p,
        mean_energy: ground.energy + coeff(0),
    })
}

fn compare(config: &RunConfig, p: &ComparePlan, dir: &StagedDir) -> Result<(), CliError> {
    let oracle = oracle_for(&p.sed, p.basis)?;
    let stats = run_ensemble(&p.sed, config.master_seed)?;
    let report = stationary_report(&stats, &oracle, p.tolerance)?;
    dir.write_json(
        "comparison.json",
        &json!({ "config": config.resolved, "oracle": oracle, "report": report, "stats": stats }),
    )
}
