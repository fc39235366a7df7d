//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys are dotted
//! (`units.gamma`, `grid.n_x`, ...). Every key must appear in [`SCHEMA`].
//! Values given on the command line replace file values, and `ZPF_WORKERS`
//! fills in `workers` when neither sets it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sedsim::phase_space::{Axis, MoyalOrder, ScalingSetup};
use sedsim::quantum_oracle::{oscillator_ground_oracle, GaussianWignerParams};
use sedsim::sed_dynamics::{InitialCondition, RadiationReaction, SedConfig};
use sedsim::{PotentialSpec, UnitSystem};
use serde::Serialize;

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SampleField,
    RunSed,
    EvolveWigner,
    HbarScaling,
    CheckLorentz,
    Compare,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::SampleField,
        Experiment::RunSed,
        Experiment::EvolveWigner,
        Experiment::HbarScaling,
        Experiment::CheckLorentz,
        Experiment::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SampleField => "sample-field",
            Experiment::RunSed => "run-sed",
            Experiment::EvolveWigner => "evolve-wigner",
            Experiment::HbarScaling => "hbar-scaling",
            Experiment::CheckLorentz => "check-lorentz",
            Experiment::Compare => "compare",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Float,
    Count,
    Seed,
    Bool,
    Text,
    FloatList,
    Choice(&'static [&'static str]),
}

impl ValueKind {
    fn describe(self) -> String {
        match self {
            ValueKind::Float => "a real number".into(),
            ValueKind::Count => "a non-negative integer".into(),
            ValueKind::Seed => "a 64-bit unsigned integer".into(),
            ValueKind::Bool => "true or false".into(),
            ValueKind::Text => "text".into(),
            ValueKind::FloatList => "a comma-separated list of real numbers".into(),
            ValueKind::Choice(options) => format!("one of {}", options.join(", ")),
        }
    }
}

pub struct KeySpec {
    pub key: &'static str,
    pub kind: ValueKind,
    pub help: &'static str,
}

const fn key(key: &'static str, kind: ValueKind, help: &'static str) -> KeySpec {
    KeySpec { key, kind, help }
}

const POTENTIAL_KINDS: &[&str] = &["harmonic", "quartic", "polynomial"];
const RR_MODELS: &[&str] = &["order-reduced", "none"];
const INIT_KINDS: &[&str] = &["rest", "vacuum"];

/// Every accepted key. Defaults depend on the experiment and are listed in the README.
pub const SCHEMA: &[KeySpec] = &[
    key(
        "experiment",
        ValueKind::Choice(&[
            "sample-field",
            "run-sed",
            "evolve-wigner",
            "hbar-scaling",
            "check-lorentz",
            "compare",
        ]),
        "must match the subcommand when present",
    ),
    key(
        "master_seed",
        ValueKind::Seed,
        "root of every random stream",
    ),
    key("out_dir", ValueKind::Text, "run directory, created fresh"),
    key(
        "workers",
        ValueKind::Count,
        "worker threads, 0 for all cores",
    ),
    key("units.hbar", ValueKind::Float, "reduced Planck constant"),
    key("units.mass", ValueKind::Float, "particle mass"),
    key("units.omega0", ValueKind::Float, "reference frequency"),
    key("units.gamma", ValueKind::Float, "coupling tau * omega0"),
    key(
        "potential.kind",
        ValueKind::Choice(POTENTIAL_KINDS),
        "shape of V(x)",
    ),
    key(
        "potential.lambda",
        ValueKind::Float,
        "quartic coefficient for kind = quartic",
    ),
    key(
        "potential.coefficients",
        ValueKind::FloatList,
        "c0, c1, ... for kind = polynomial",
    ),
    key("band.omega_min", ValueKind::Float, "lowest field frequency"),
    key(
        "band.omega_max",
        ValueKind::Float,
        "highest field frequency",
    ),
    key("band.n_modes", ValueKind::Count, "number of field modes"),
    key(
        "band.jitter",
        ValueKind::Bool,
        "stratified jitter of mode frequencies",
    ),
    key(
        "field.duration",
        ValueKind::Float,
        "length of the sampled force record",
    ),
    key(
        "field.dt",
        ValueKind::Float,
        "sampling step of the force record",
    ),
    key("integrator.dt", ValueKind::Float, "trajectory time step"),
    key("integrator.t_end", ValueKind::Float, "trajectory length"),
    key("integrator.t_burn", ValueKind::Float, "discarded transient"),
    key(
        "integrator.rr_model",
        ValueKind::Choice(RR_MODELS),
        "radiation reaction model",
    ),
    key(
        "integrator.stride",
        ValueKind::Count,
        "decimation of dumped trajectories",
    ),
    key("ensemble.n_trajectories", ValueKind::Count, "ensemble size"),
    key(
        "ensemble.init",
        ValueKind::Choice(INIT_KINDS),
        "start at rest or from the vacuum Wigner function",
    ),
    key(
        "ensemble.trajectory_dumps",
        ValueKind::Count,
        "number of trajectories written as CSV",
    ),
    key("grid.x_min", ValueKind::Float, "phase-space box"),
    key("grid.x_max", ValueKind::Float, "phase-space box"),
    key("grid.n_x", ValueKind::Count, "points along x"),
    key("grid.p_min", ValueKind::Float, "phase-space box"),
    key("grid.p_max", ValueKind::Float, "phase-space box"),
    key("grid.n_p", ValueKind::Count, "points along p"),
    key("wigner.mean_x", ValueKind::Float, "initial Gaussian"),
    key("wigner.mean_p", ValueKind::Float, "initial Gaussian"),
    key("wigner.var_x", ValueKind::Float, "initial Gaussian"),
    key("wigner.var_p", ValueKind::Float, "initial Gaussian"),
    key("wigner.cov_xp", ValueKind::Float, "initial Gaussian"),
    key(
        "wigner.order",
        ValueKind::Count,
        "Moyal truncation index, 0 to 3",
    ),
    key("wigner.t_final", ValueKind::Float, "evolution time"),
    key(
        "wigner.dt",
        ValueKind::Float,
        "time step, largest stable step when absent",
    ),
    key(
        "scaling.hbar_list",
        ValueKind::FloatList,
        "values of hbar to compare",
    ),
    key("scaling.t_final", ValueKind::Float, "evolution time"),
    key(
        "scaling.dt_fraction",
        ValueKind::Float,
        "fraction of the stable step",
    ),
    key(
        "lorentz.exponent",
        ValueKind::Float,
        "spectral exponent s of w^s",
    ),
    key("lorentz.beta", ValueKind::Float, "boost velocity over c"),
    key("lorentz.n_samples", ValueKind::Count, "Monte Carlo modes"),
    key(
        "compare.tolerance",
        ValueKind::Float,
        "relative agreement threshold",
    ),
    key(
        "compare.basis",
        ValueKind::Count,
        "starting basis size of the anharmonic oracle",
    ),
];

fn spec_for(name: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|s| s.key == name)
}

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Environment,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => f.write_str("command line"),
            Origin::Environment => f.write_str("ZPF_WORKERS"),
        }
    }
}

/// Values set on the command line.
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// `key=value` assignments from `--set`.
    pub set: Vec<String>,
    /// Value of `ZPF_WORKERS`, if any.
    pub env_workers: Option<String>,
}

/// Raw assignments before typing.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: lineno,
                message: format!("expected `key = value`, found {content:?}"),
            })?;
            let k = k.trim();
            if let Some((_, origin)) = raw.entries.get(k) {
                return Err(ConfigError::Duplicate {
                    key: k.to_string(),
                    line: lineno,
                    first: origin.to_string(),
                });
            }
            raw.insert(k, v.trim(), Origin::Line(lineno))?;
        }
        Ok(raw)
    }

    fn insert(&mut self, k: &str, v: &str, origin: Origin) -> Result<(), ConfigError> {
        if spec_for(k).is_none() {
            return Err(ConfigError::UnknownKey {
                key: k.to_string(),
                origin: origin.to_string(),
            });
        }
        self.entries.insert(k.to_string(), (v.to_string(), origin));
        Ok(())
    }

    pub fn apply(&mut self, flags: &FlagOverrides) -> Result<(), ConfigError> {
        for assignment in &flags.set {
            let (k, v) = assignment
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax {
                    line: 0,
                    message: format!("--set expects key=value, got {assignment:?}"),
                })?;
            self.insert(k.trim(), v.trim(), Origin::Flag)?;
        }
        if let Some(seed) = flags.seed {
            self.insert("master_seed", &seed.to_string(), Origin::Flag)?;
        }
        if let Some(dir) = &flags.out_dir {
            self.insert("out_dir", &dir.to_string_lossy(), Origin::Flag)?;
        }
        if !self.entries.contains_key("workers") {
            if let Some(w) = &flags.env_workers {
                self.insert("workers", w, Origin::Environment)?;
            }
        }
        Ok(())
    }
}

/// Typed reader over a [`RawConfig`] that records every value it hands out.
struct Reader<'a> {
    raw: &'a RawConfig,
    resolved: BTreeMap<String, String>,
}

impl<'a> Reader<'a> {
    fn text(&self, k: &str) -> Option<(&'a str, &'a Origin)> {
        self.raw.entries.get(k).map(|(v, o)| (v.as_str(), o))
    }

    fn mismatch(k: &str, v: &str, origin: &Origin) -> ConfigError {
        ConfigError::Type {
            key: k.to_string(),
            origin: origin.to_string(),
            expected: spec_for(k).map_or_else(String::new, |s| s.kind.describe()),
            value: v.to_string(),
        }
    }

    fn typed<T: FromStr + ToString>(&mut self, k: &str, default: T) -> Result<T, ConfigError> {
        let value = match self.text(k) {
            Some((v, origin)) => v.parse().map_err(|_| Self::mismatch(k, v, origin))?,
            None => default,
        };
        self.resolved.insert(k.to_string(), value.to_string());
        Ok(value)
    }

    fn float(&mut self, k: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.typed(k, default)?;
        if !v.is_finite() {
            return Err(invalid(k, "must be finite"));
        }
        Ok(v)
    }

    fn optional_float(&mut self, k: &str) -> Result<Option<f64>, ConfigError> {
        match self.text(k) {
            Some(_) => self.float(k, 0.0).map(Some),
            None => Ok(None),
        }
    }

    fn count(&mut self, k: &str, default: usize) -> Result<usize, ConfigError> {
        self.typed(k, default)
    }

    fn flag(&mut self, k: &str, default: bool) -> Result<bool, ConfigError> {
        self.typed(k, default)
    }

    fn choice(&mut self, k: &str, default: &str) -> Result<String, ConfigError> {
        let value = match self.text(k) {
            Some((v, origin)) => {
                let Some(ValueKind::Choice(options)) = spec_for(k).map(|s| s.kind) else {
                    unreachable!("{k} is not a choice key")
                };
                if !options.contains(&v) {
                    return Err(Self::mismatch(k, v, origin));
                }
                v.to_string()
            }
            None => default.to_string(),
        };
        self.resolved.insert(k.to_string(), value.clone());
        Ok(value)
    }

    fn list(&mut self, k: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let values = match self.text(k) {
            Some((v, origin)) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Self::mismatch(k, v, origin))?,
            None => default.to_vec(),
        };
        let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        self.resolved.insert(k.to_string(), shown.join(","));
        Ok(values)
    }
}

fn invalid(k: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: k.to_string(),
        message: message.into(),
    }
}

/// Attributes a core validation failure to the key it concerns.
fn check(k: &str, result: sedsim::Result<()>) -> Result<(), ConfigError> {
    result.map_err(|e| invalid(k, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldPlan {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_modes: usize,
    pub jitter: bool,
    pub duration: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SedPlan {
    pub sed: SedConfig,
    pub trajectory_dumps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerPlan {
    pub x_axis: Axis,
    pub p_axis: Axis,
    pub potential: PotentialSpec,
    pub initial: GaussianWignerParams,
    pub order: MoyalOrder,
    pub t_final: f64,
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPlan {
    pub potential: PotentialSpec,
    pub hbar_list: Vec<f64>,
    pub t_final: f64,
    pub setup: ScalingSetup,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorentzPlan {
    pub exponent: f64,
    pub beta: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparePlan {
    pub sed: SedConfig,
    pub tolerance: f64,
    pub basis: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plan {
    SampleField(FieldPlan),
    RunSed(SedPlan),
    EvolveWigner(WignerPlan),
    HbarScaling(ScalingPlan),
    CheckLorentz(LorentzPlan),
    Compare(ComparePlan),
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub units: UnitSystem,
    pub plan: Plan,
    /// Every key the run consumed, with defaults filled in.
    pub resolved: BTreeMap<String, String>,
}

impl RunConfig {
    /// The resolved configuration in the input format.
    pub fn to_config_text(&self) -> String {
        self.resolved
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

/// Reads `path`, applies `flags` and validates everything `experiment` needs.
pub fn parse_config(
    path: &Path,
    experiment: Experiment,
    flags: &FlagOverrides,
) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_text(&text, experiment, flags)
}

pub fn parse_config_text(
    text: &str,
    experiment: Experiment,
    flags: &FlagOverrides,
) -> Result<RunConfig, ConfigError> {
    let mut raw = RawConfig::parse(text)?;
    raw.apply(flags)?;
    build(&raw, experiment)
}

fn build(raw: &RawConfig, experiment: Experiment) -> Result<RunConfig, ConfigError> {
    let mut r = Reader {
        raw,
        resolved: BTreeMap::new(),
    };
    let declared = r.choice("experiment", experiment.name())?;
    if declared != experiment.name() {
        return Err(invalid(
            "experiment",
            format!("file declares {declared} but the subcommand is {experiment}"),
        ));
    }
    let master_seed = r.typed("master_seed", 0u64)?;
    let out_dir = PathBuf::from(r.typed("out_dir", format!("zpf-out/{experiment}"))?);
    let workers = r.count("workers", 0)?;
    let units = UnitSystem {
        hbar: r.float("units.hbar", 1.0)?,
        mass: r.float("units.mass", 1.0)?,
        omega0: r.float("units.omega0", 1.0)?,
        gamma: r.float("units.gamma", 0.01)?,
    };
    check("units.gamma", units.validate())?;

    let plan = match experiment {
        Experiment::SampleField => Plan::SampleField(field_plan(&mut r)?),
        Experiment::RunSed => {
            let sed = sed_config(&mut r, &units, workers)?;
            let trajectory_dumps = r.count("ensemble.trajectory_dumps", 0)?;
            if trajectory_dumps > sed.n_trajectories {
                return Err(invalid(
                    "ensemble.trajectory_dumps",
                    "exceeds ensemble.n_trajectories",
                ));
            }
            Plan::RunSed(SedPlan {
                sed,
                trajectory_dumps,
            })
        }
        Experiment::EvolveWigner => Plan::EvolveWigner(wigner_plan(&mut r, &units)?),
        Experiment::HbarScaling => Plan::HbarScaling(scaling_plan(&mut r, &units)?),
        Experiment::CheckLorentz => Plan::CheckLorentz(LorentzPlan {
            exponent: r.float("lorentz.exponent", 3.0)?,
            beta: r.float("lorentz.beta", 0.3)?,
            n_samples: r.count("lorentz.n_samples", 1_000_000)?,
        }),
        Experiment::Compare => {
            let sed = sed_config(&mut r, &units, workers)?;
            let tolerance = r.float("compare.tolerance", 0.1)?;
            if !(tolerance > 0.0) {
                return Err(invalid("compare.tolerance", "must be positive"));
            }
            let basis = r.count("compare.basis", 80)?;
            Plan::Compare(ComparePlan {
                sed,
                tolerance,
                basis,
            })
        }
    };
    if let Plan::CheckLorentz(p) = &plan {
        if !(0.0..=0.6).contains(&p.beta) {
            return Err(invalid(
                "lorentz.beta",
                format!("must lie in [0, 0.6], got {}", p.beta),
            ));
        }
        if p.n_samples < 100_000 {
            return Err(invalid("lorentz.n_samples", "must be at least 100000"));
        }
    }

    Ok(RunConfig {
        experiment,
        master_seed,
        out_dir,
        workers,
        units,
        plan,
        resolved: r.resolved,
    })
}

fn potential(
    r: &mut Reader,
    units: &UnitSystem,
    default_kind: &str,
) -> Result<PotentialSpec, ConfigError> {
    match r.choice("potential.kind", default_kind)?.as_str() {
        "harmonic" => Ok(PotentialSpec::harmonic(units.mass, units.omega0)),
        "quartic" => {
            let lambda = r.float("potential.lambda", 0.25)?;
            if !(lambda > 0.0) {
                return Err(invalid("potential.lambda", "must be positive"));
            }
            Ok(PotentialSpec::quartic(lambda))
        }
        _ => {
            if r.text("potential.coefficients").is_none() {
                return Err(ConfigError::Missing {
                    key: "potential.coefficients".into(),
                    reason: "required when potential.kind = polynomial".into(),
                });
            }
            let c = r.list("potential.coefficients", &[])?;
            PotentialSpec::new(c).map_err(|e| invalid("potential.coefficients", e.to_string()))
        }
    }
}

fn field_plan(r: &mut Reader) -> Result<FieldPlan, ConfigError> {
    let omega_min = r.float("band.omega_min", 0.5)?;
    let omega_max = r.float("band.omega_max", 5.0)?;
    if !(omega_min > 0.0 && omega_max > omega_min) {
        return Err(invalid(
            "band.omega_max",
            "band must satisfy 0 < omega_min < omega_max",
        ));
    }
    let n_modes = r.count("band.n_modes", 1024)?;
    if n_modes < 2 {
        return Err(invalid("band.n_modes", "need at least 2 modes"));
    }
    let jitter = r.flag("band.jitter", true)?;
    let duration = r.float(
        "field.duration",
        200.0 * 2.0 * std::f64::consts::PI / omega_min,
    )?;
    let dt = r.float("field.dt", std::f64::consts::PI / (4.0 * omega_max))?;
    if !(dt > 0.0 && dt <= std::f64::consts::PI / (4.0 * omega_max)) {
        return Err(invalid("field.dt", "must lie in (0, pi / (4 omega_max)]"));
    }
    if !(duration >= 50.0 * 2.0 * std::f64::consts::PI / omega_min) {
        return Err(invalid(
            "field.duration",
            "must cover at least 50 periods of omega_min",
        ));
    }
    Ok(FieldPlan {
        omega_min,
        omega_max,
        n_modes,
        jitter,
        duration,
        dt,
    })
}

fn sed_config(
    r: &mut Reader,
    units: &UnitSystem,
    workers: usize,
) -> Result<SedConfig, ConfigError> {
    let d = SedConfig::harmonic_default(*units);
    let potential = potential(r, units, "harmonic")?;
    let init = match r.choice("ensemble.init", "rest")?.as_str() {
        "rest" => InitialCondition::Fixed { x0: 0.0, p0: 0.0 },
        _ => InitialCondition::Wigner(oscillator_ground_oracle(
            units.mass,
            units.omega0,
            units.hbar,
        )),
    };
    let rr_model = match r.choice("integrator.rr_model", "order-reduced")?.as_str() {
        "order-reduced" => RadiationReaction::OrderReduced,
        _ => RadiationReaction::None,
    };
    let sed = SedConfig {
        units: *units,
        potential,
        omega_min: r.float("band.omega_min", d.omega_min)?,
        omega_max: r.float("band.omega_max", d.omega_max)?,
        n_modes: r.count("band.n_modes", d.n_modes)?,
        jitter: r.flag("band.jitter", d.jitter)?,
        dt: r.float("integrator.dt", d.dt)?,
        t_end: r.float("integrator.t_end", d.t_end)?,
        t_burn: r.float("integrator.t_burn", d.t_burn)?,
        n_trajectories: r.count("ensemble.n_trajectories", d.n_trajectories)?,
        rr_model,
        init,
        stride: r.count("integrator.stride", d.stride)?,
        workers,
    };
    sed.validate().map_err(|e| {
        let message = e.to_string();
        let k = sed_key_for(&message);
        invalid(k, message)
    })?;
    Ok(sed)
}

/// Best key to blame for a [`SedConfig::validate`] message.
fn sed_key_for(message: &str) -> &'static str {
    let table = [
        ("confining", "potential.kind"),
        ("band", "band.omega_min"),
        ("n_modes", "band.n_modes"),
        ("dt", "integrator.dt"),
        ("t_burn", "integrator.t_burn"),
        ("t_end", "integrator.t_end"),
        ("n_trajectories", "ensemble.n_trajectories"),
        ("stride", "integrator.stride"),
    ];
    table
        .iter()
        .find(|(needle, _)| message.contains(needle))
        .map_or("integrator", |(_, k)| k)
}

fn axis(r: &mut Reader, name: &str, default: Axis) -> Result<Axis, ConfigError> {
    let lo = r.float(&format!("grid.{name}_min"), default.min)?;
    let hi = r.float(&format!("grid.{name}_max"), default.max)?;
    let n_key = format!("grid.n_{name}");
    let n = r.count(&n_key, default.n)?;
    Axis::new(lo, hi, n).map_err(|e| invalid(&n_key, e.to_string()))
}

fn gaussian(
    r: &mut Reader,
    default: GaussianWignerParams,
) -> Result<GaussianWignerParams, ConfigError> {
    Ok(GaussianWignerParams {
        mean_x: r.float("wigner.mean_x", default.mean_x)?,
        mean_p: r.float("wigner.mean_p", default.mean_p)?,
        var_x: r.float("wigner.var_x", default.var_x)?,
        var_p: r.float("wigner.var_p", default.var_p)?,
        cov_xp: r.float("wigner.cov_xp", default.cov_xp)?,
    })
}

fn wigner_plan(r: &mut Reader, units: &UnitSystem) -> Result<WignerPlan, ConfigError> {
    let box_axis = Axis {
        min: -6.0,
        max: 6.0,
        n: 256,
    };
    let x_axis = axis(r, "x", box_axis)?;
    let p_axis = axis(r, "p", box_axis)?;
    let potential = potential(r, units, "harmonic")?;
    let ground = oscillator_ground_oracle(units.mass, units.omega0, units.hbar).displaced(1.0, 0.0);
    let initial = gaussian(r, ground)?;
    check("wigner.var_x", initial.validate(units.hbar))?;
    let n_max = r.count("wigner.order", 0)?;
    let order = u8::try_from(n_max)
        .ok()
        .and_then(|n| MoyalOrder::new(n).ok())
        .ok_or_else(|| {
            invalid(
                "wigner.order",
                format!("must lie in 0..={}, got {n_max}", MoyalOrder::MAX),
            )
        })?;
    let t_final = r.float("wigner.t_final", 2.0 * std::f64::consts::PI / units.omega0)?;
    if !(t_final > 0.0) {
        return Err(invalid("wigner.t_final", "must be positive"));
    }
    let dt = r.optional_float("wigner.dt")?;
    if let Some(dt) = dt {
        if !(dt > 0.0) {
            return Err(invalid("wigner.dt", "must be positive"));
        }
    }
    Ok(WignerPlan {
        x_axis,
        p_axis,
        potential,
        initial,
        order,
        t_final,
        dt,
    })
}

fn scaling_plan(r: &mut Reader, units: &UnitSystem) -> Result<ScalingPlan, ConfigError> {
    let reference = ScalingSetup::quartic_reference();
    let x_axis = axis(r, "x", reference.x_axis)?;
    let p_axis = axis(r, "p", reference.p_axis)?;
    let potential = potential(r, units, "quartic")?;
    if potential.degree() < 3 {
        return Err(invalid(
            "potential.kind",
            "the scaling study needs an anharmonic potential",
        ));
    }
    let initial = gaussian(r, reference.initial)?;
    let hbar_list = r.list("scaling.hbar_list", &[0.05, 0.1, 0.2, 0.4])?;
    if hbar_list.len() < 4 {
        return Err(invalid("scaling.hbar_list", "need at least 4 values"));
    }
    let lo = hbar_list.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hbar_list.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0 && hi >= 2.0 * lo) {
        return Err(invalid(
            "scaling.hbar_list",
            "values must be positive and span at least one octave",
        ));
    }
    for &h in &hbar_list {
        check("wigner.var_x", initial.validate(h))?;
    }
    let t_final = r.float("scaling.t_final", 1.0)?;
    if !(t_final > 0.0) {
        return Err(invalid("scaling.t_final", "must be positive"));
    }
    let dt_fraction = r.float("scaling.dt_fraction", 1.0)?;
    if !(dt_fraction > 0.0 && dt_fraction <= 1.0) {
        return Err(invalid("scaling.dt_fraction", "must lie in (0, 1]"));
    }
    Ok(ScalingPlan {
        potential,
        hbar_list,
        t_final,
        setup: ScalingSetup {
            x_axis,
            p_axis,
            initial,
            mass: units.mass,
            dt_fraction,
        },
    })
}
