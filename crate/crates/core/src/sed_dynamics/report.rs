use serde::{Deserialize, Serialize};

use super::ensemble::{EnsembleStats, Estimate};
use crate::error::{config_err, Result};
use crate::units::UnitSystem;

/// Quantum reference values for the stationary moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMoments {
    pub hbar: f64,
    pub mass: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub mean_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub observable: String,
    pub sed: f64,
    pub sed_stderr: f64,
    pub oracle: f64,
    pub relative_deviation: f64,
    /// `|sed - oracle| / stderr`.
    pub significance: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub rows: Vec<ComparisonRow>,
    pub agree: bool,
}

impl ComparisonReport {
    pub fn row(&self, observable: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.observable == observable)
    }
}

fn same_units(units: &UnitSystem, oracle: &OracleMoments) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    close(units.hbar, oracle.hbar) && close(units.mass, oracle.mass)
}

/// Tabulate SED estimates against quantum values; rows agree when the
/// relative deviation is below `tolerance`.
pub fn stationary_report(
    stats: &EnsembleStats,
    oracle: &OracleMoments,
    tolerance: f64,
) -> Result<ComparisonReport> {
    if !same_units(&stats.units, oracle) {
        return config_err(format!(
            "unit mismatch: ensemble (hbar={}, m={}) vs oracle (hbar={}, m={})",
            stats.units.hbar, stats.units.mass, oracle.hbar, oracle.mass
        ));
    }
    let row = |name: &str, est: Estimate, reference: f64| {
        let diff = est.value - reference;
        let relative_deviation = if reference != 0.0 {
            diff.abs() / reference.abs()
        } else {
            diff.abs()
        };
        ComparisonRow {
            observable: name.to_string(),
            sed: est.value,
            sed_stderr: est.stderr,
            oracle: reference,
            relative_deviation,
            significance: if est.stderr > 0.0 {
                diff.abs() / est.stderr
            } else {
                0.0
            },
            agree: relative_deviation < tolerance,
        }
    };
    let rows = vec![
        row("var_x", stats.var_x, oracle.var_x),
        row("var_p", stats.var_p, oracle.var_p),
        row("mean_energy", stats.mean_energy, oracle.mean_energy),
    ];
    let agree = rows.iter().all(|r| r.agree);
    Ok(ComparisonReport {
        tolerance,
        rows,
        agree,
    })
}

impl OracleMoments {
    /// Moments of the stationary SED estimate itself, for self-comparison.
    pub fn from_stats(stats: &EnsembleStats) -> Self {
        OracleMoments {
            hbar: stats.units.hbar,
            mass: stats.units.mass,
            var_x: stats.var_x.value,
            var_p: stats.var_p.value,
            mean_energy: stats.mean_energy.value,
        }
    }
}
