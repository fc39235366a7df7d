use std::fs;
use std::path::Path;
use std::process::Command;

use sedsim::phase_space::{read_grid_binary, read_grid_csv};
use sedsim_cli::config::Plan;
use sedsim_cli::{
    parse_config, parse_config_text, run, CliError, ConfigError, Experiment, FlagOverrides,
};

fn no_flags() -> FlagOverrides {
    FlagOverrides::default()
}

const SMALL_SED: &str = "\
units.gamma = 0.05
band.n_modes = 48
integrator.t_burn = 100
integrator.t_end = 200
ensemble.n_trajectories = 4
";

fn with_out(text: &str, dir: &Path) -> String {
    format!("{text}out_dir = {}\n", dir.display())
}

#[test]
fn minimal_harmonic_config_gets_defaults() {
    let cfg = parse_config_text("experiment = run-sed\n", Experiment::RunSed, &no_flags()).unwrap();
    let Plan::RunSed(plan) = &cfg.plan else {
        panic!("wrong plan")
    };
    assert_eq!(plan.sed.n_trajectories, 500);
    assert_eq!(plan.sed.n_modes, 256);
    assert_eq!(plan.sed.dt, 0.02);
    assert_eq!(plan.sed.t_burn, 500.0);
    assert_eq!(plan.sed.t_end, 1000.0);
    assert_eq!((plan.sed.omega_min, plan.sed.omega_max), (0.2, 5.0));
    assert_eq!(cfg.units.gamma, 0.01);
    assert_eq!(cfg.resolved["ensemble.n_trajectories"], "500");
}

#[test]
fn large_gamma_is_rejected() {
    let err =
        parse_config_text("units.gamma = 0.5\n", Experiment::RunSed, &no_flags()).unwrap_err();
    assert!(
        matches!(err, ConfigError::Invalid { ref key, .. } if key == "units.gamma"),
        "{err}"
    );
}

#[test]
fn seed_flag_overrides_file() {
    let flags = FlagOverrides {
        seed: Some(7),
        ..Default::default()
    };
    let cfg = parse_config_text("master_seed = 3\n", Experiment::RunSed, &flags).unwrap();
    assert_eq!(cfg.master_seed, 7);
    let cfg = parse_config_text("master_seed = 3\n", Experiment::RunSed, &no_flags()).unwrap();
    assert_eq!(cfg.master_seed, 3);
}

#[test]
fn set_flag_overrides_file() {
    let flags = FlagOverrides {
        set: vec!["ensemble.n_trajectories=12".into()],
        ..Default::default()
    };
    let cfg =
        parse_config_text("ensemble.n_trajectories = 40\n", Experiment::RunSed, &flags).unwrap();
    let Plan::RunSed(plan) = &cfg.plan else {
        panic!("wrong plan")
    };
    assert_eq!(plan.sed.n_trajectories, 12);
}

#[test]
fn diagnostics_are_distinct_and_name_the_key() {
    let unknown = parse_config_text(
        "units.hbar = 1\nbogus.key = 3\n",
        Experiment::RunSed,
        &no_flags(),
    )
    .unwrap_err();
    assert!(matches!(unknown, ConfigError::UnknownKey { .. }));
    let msg = unknown.to_string();
    assert!(msg.contains("bogus.key") && msg.contains("line 2"), "{msg}");

    let mismatch =
        parse_config_text("band.n_modes = many\n", Experiment::RunSed, &no_flags()).unwrap_err();
    assert!(matches!(mismatch, ConfigError::Type { .. }));
    let msg = mismatch.to_string();
    assert!(
        msg.contains("band.n_modes") && msg.contains("line 1") && msg.contains("integer"),
        "{msg}"
    );

    let syntax = parse_config_text("units.hbar 1\n", Experiment::RunSed, &no_flags()).unwrap_err();
    assert!(matches!(syntax, ConfigError::Syntax { line: 1, .. }));

    let choice = parse_config_text(
        "integrator.rr_model = full\n",
        Experiment::RunSed,
        &no_flags(),
    )
    .unwrap_err();
    assert!(choice.to_string().contains("order-reduced"), "{choice}");

    let wrong =
        parse_config_text("experiment = compare\n", Experiment::RunSed, &no_flags()).unwrap_err();
    assert!(wrong.to_string().contains("experiment"));

    let missing = parse_config(
        Path::new("/nonexistent/zpf.cfg"),
        Experiment::RunSed,
        &no_flags(),
    )
    .unwrap_err();
    assert!(matches!(missing, ConfigError::Read { .. }));
}

#[test]
fn polynomial_potential_needs_coefficients() {
    let err = parse_config_text(
        "potential.kind = polynomial\n",
        Experiment::RunSed,
        &no_flags(),
    )
    .unwrap_err();
    assert!(matches!(err, ConfigError::Missing { ref key, .. } if key == "potential.coefficients"));
    let odd = parse_config_text(
        "potential.kind = polynomial\npotential.coefficients = 0, 0, 0, 1\n",
        Experiment::RunSed,
        &no_flags(),
    )
    .unwrap_err();
    assert!(odd.to_string().contains("potential.kind"), "{odd}");
}

#[test]
fn check_lorentz_cubic_is_invariant() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("lorentz");
    let cfg = parse_config_text(
        &with_out("lorentz.beta = 0.3\n", &out),
        Experiment::CheckLorentz,
        &no_flags(),
    )
    .unwrap();
    run(&cfg).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("boost_report.json")).unwrap()).unwrap();
    assert_eq!(report["invariant"], serde_json::Value::Bool(true));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "check-lorentz");
    assert_eq!(manifest["master_seed"], 0);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "boost_spectrum.csv"));
}

#[test]
fn rerun_is_byte_identical_and_never_overwrites() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let cfg_a =
        parse_config_text(&with_out(SMALL_SED, &a), Experiment::RunSed, &no_flags()).unwrap();
    let flags = FlagOverrides {
        set: vec!["workers=2".into(), "ensemble.trajectory_dumps=1".into()],
        ..Default::default()
    };
    let cfg_b = parse_config_text(&with_out(SMALL_SED, &b), Experiment::RunSed, &flags).unwrap();
    run(&cfg_a).unwrap();
    run(&cfg_b).unwrap();
    let stats = |dir: &Path| -> serde_json::Value {
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("ensemble_stats.json")).unwrap())
                .unwrap();
        v["stats"].clone()
    };
    assert_eq!(stats(&a), stats(&b));
    assert!(b.join("trajectory_0.csv").exists());

    let before = fs::read(a.join("ensemble_stats.json")).unwrap();
    let err = run(&cfg_a).unwrap_err();
    assert!(matches!(err, CliError::OutputExists(_)));
    assert_eq!(fs::read(a.join("ensemble_stats.json")).unwrap(), before);

    let c = tmp.path().join("c");
    let cfg_c =
        parse_config_text(&with_out(SMALL_SED, &c), Experiment::RunSed, &no_flags()).unwrap();
    run(&cfg_c).unwrap();
    assert_eq!(
        fs::read(c.join("ensemble_stats.json")).unwrap().len(),
        before.len()
    );
    let text_a = fs::read_to_string(a.join("ensemble_stats.json")).unwrap();
    let text_c = fs::read_to_string(c.join("ensemble_stats.json")).unwrap();
    assert_eq!(
        text_a.replace(&a.display().to_string(), ""),
        text_c.replace(&c.display().to_string(), "")
    );
}

#[test]
fn failed_run_leaves_nothing_behind() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("escape");
    let text = "units.hbar = 0.1\ngrid.x_min = -4\ngrid.x_max = 4\ngrid.n_x = 81\ngrid.p_min = -5\ngrid.p_max = 5\ngrid.n_p = 81\n\
                potential.kind = polynomial\npotential.coefficients = 0\n\
                wigner.var_x = 0.1\nwigner.var_p = 0.1\nwigner.mean_p = 2\nwigner.t_final = 3\n";
    let cfg =
        parse_config_text(&with_out(text, &out), Experiment::EvolveWigner, &no_flags()).unwrap();
    let err = run(&cfg).unwrap_err();
    assert_eq!(err.kind(), "grid_escape", "{err}");
    assert!(!out.exists());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn evolve_wigner_writes_matching_grids() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("wigner");
    let text = "grid.n_x = 97\ngrid.n_p = 97\nwigner.t_final = 0.5\nwigner.order = 2\n";
    let cfg =
        parse_config_text(&with_out(text, &out), Experiment::EvolveWigner, &no_flags()).unwrap();
    run(&cfg).unwrap();
    let csv = read_grid_csv(std::io::BufReader::new(
        fs::File::open(out.join("wigner_final.csv")).unwrap(),
    ))
    .unwrap();
    let bin = read_grid_binary(fs::File::open(out.join("wigner_final.bin")).unwrap()).unwrap();
    assert_eq!(csv, bin);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("wigner_summary.json")).unwrap())
            .unwrap();
    assert!((summary["energy"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(fs::read_to_string(out.join("config.txt"))
        .unwrap()
        .contains("wigner.order = 2"));
}

#[test]
fn sample_field_emits_single_line_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("field");
    let cfg = parse_config_text(
        &with_out("band.n_modes = 256\n", &out),
        Experiment::SampleField,
        &no_flags(),
    )
    .unwrap();
    run(&cfg).unwrap();
    let text = fs::read_to_string(out.join("periodogram.json")).unwrap();
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(
        (v["fit_exponent"].as_f64().unwrap() - 3.0).abs() < 0.3,
        "{v}"
    );
    assert!(fs::read_to_string(out.join("realization.csv"))
        .unwrap()
        .starts_with("# seed=0\n"));
}

#[test]
fn scaling_rejects_quadratic_before_compute() {
    let err = parse_config_text(
        "potential.kind = harmonic\n",
        Experiment::HbarScaling,
        &no_flags(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("potential.kind"));
}

#[test]
fn compare_rejects_potential_without_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("{SMALL_SED}potential.kind = polynomial\npotential.coefficients = 0, 0, 0.5, 0, 0, 0, 0.1\n");
    let cfg = parse_config_text(
        &with_out(&text, &tmp.path().join("cmp")),
        Experiment::Compare,
        &no_flags(),
    )
    .unwrap();
    let err = run(&cfg).unwrap_err();
    assert_eq!(err.kind(), "config");
}

#[test]
fn binary_reports_errors_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "units.gamma = 0.5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_zpf"))
        .args(["run-sed", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "config");
    assert!(record["error"]["message"]
        .as_str()
        .unwrap()
        .contains("units.gamma"));
}

#[test]
fn binary_runs_with_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("l.cfg");
    fs::write(&cfg, "lorentz.n_samples = 200000\n").unwrap();
    let out_dir = tmp.path().join("run");
    let out = Command::new(env!("CARGO_BIN_EXE_zpf"))
        .args(["check-lorentz", "--seed", "11", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(&out_dir)
        .env("ZPF_WORKERS", "1")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 11);
    assert_eq!(manifest["config"]["workers"], "1");
}
