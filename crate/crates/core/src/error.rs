use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("integration blew up at t = {time}{}", trajectory_suffix(*.trajectory))]
    IntegrationBlowup {
        time: f64,
        trajectory: Option<usize>,
    },

    #[error("ensemble aborted: {failed} of {total} trajectories blew up (first at trajectory {first_index}, t = {first_time})")]
    EnsembleAborted {
        failed: usize,
        total: usize,
        first_index: usize,
        first_time: f64,
    },

    #[error("grid escape at t = {time}: boundary mass {boundary_mass:.3e} exceeds tolerance")]
    GridEscape { time: f64, boundary_mass: f64 },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn trajectory_suffix(index: Option<usize>) -> String {
    match index {
        Some(k) => format!(" (trajectory {k})"),
        None => String::new(),
    }
}

impl SimError {
    /// Short machine-readable tag used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            SimError::Config(_) => "config",
            SimError::IntegrationBlowup { .. } => "integration_blowup",
            SimError::EnsembleAborted { .. } => "ensemble_aborted",
            SimError::GridEscape { .. } => "grid_escape",
            SimError::Convergence(_) => "convergence",
            SimError::Io(_) => "io",
            SimError::Parse(_) => "parse",
        }
    }
}

impl From<std::io::Error> for SimError {
    fn from(err: std::io::Error) -> Self {
        SimError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(SimError::Config(msg.into()))
}
