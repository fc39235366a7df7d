//! CSV formats for realizations, periodograms and boost spectra.
//!
//! Realizations:
//!
//! ```text
//! # seed=<u64>
//! # stream=<u64>
//! # band=<omega_min>,<omega_max>
//! omega,h,u,v
//! ...one row per mode...
//! ```
//! Floats are written with round-trip precision.

use std::io::{BufRead, Write};

use super::boost::BoostReport;
use super::modes::{Mode, ModeSet};
use super::realization::FieldRealization;
use super::spectrum::Periodogram;
use crate::error::{Result, SimError};

pub fn write_realization_csv<W: Write>(realization: &FieldRealization, mut out: W) -> Result<()> {
    let set = realization.mode_set();
    writeln!(out, "# seed={}", realization.seed())?;
    writeln!(out, "# stream={}", realization.stream())?;
    writeln!(out, "# band={:?},{:?}", set.omega_min(), set.omega_max())?;
    writeln!(out, "omega,h,u,v")?;
    for (m, (u, v)) in set.modes().iter().zip(realization.amplitudes()) {
        writeln!(out, "{:?},{:?},{:?},{:?}", m.omega, m.weight, u, v)?;
    }
    Ok(())
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| SimError::Parse(format!("line {line}: bad number {s:?}")))
}

pub fn read_realization_csv<R: BufRead>(input: R) -> Result<FieldRealization> {
    let mut seed = None;
    let mut stream = 0;
    let mut band = None;
    let mut modes = Vec::new();
    let mut amplitudes = Vec::new();
    let mut saw_header = false;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let (key, value) = meta
                .trim()
                .split_once('=')
                .ok_or_else(|| SimError::Parse(format!("line {lineno}: bad header {line:?}")))?;
            match key.trim() {
                "seed" => {
                    seed = Some(value.trim().parse().map_err(|_| {
                        SimError::Parse(format!("line {lineno}: bad seed {value:?}"))
                    })?)
                }
                "stream" => {
                    stream = value.trim().parse().map_err(|_| {
                        SimError::Parse(format!("line {lineno}: bad stream {value:?}"))
                    })?
                }
                "band" => {
                    let (lo, hi) = value.split_once(',').ok_or_else(|| {
                        SimError::Parse(format!("line {lineno}: band needs two values"))
                    })?;
                    band = Some((parse_f64(lo, lineno)?, parse_f64(hi, lineno)?));
                }
                other => {
                    return Err(SimError::Parse(format!(
                        "line {lineno}: unknown header key {other:?}"
                    )))
                }
            }
            continue;
        }
        if !saw_header {
            if line != "omega,h,u,v" {
                return Err(SimError::Parse(format!(
                    "line {lineno}: expected column header"
                )));
            }
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(SimError::Parse(format!(
                "line {lineno}: expected 4 columns"
            )));
        }
        modes.push(Mode {
            omega: parse_f64(cols[0], lineno)?,
            weight: parse_f64(cols[1], lineno)?,
        });
        amplitudes.push((parse_f64(cols[2], lineno)?, parse_f64(cols[3], lineno)?));
    }
    let seed = seed.ok_or_else(|| SimError::Parse("missing '# seed=' header".into()))?;
    let (lo, hi) = match band {
        Some(b) => b,
        None => (
            modes.first().map_or(0.0, |m| m.omega),
            modes.last().map_or(0.0, |m| m.omega),
        ),
    };
    let set = ModeSet::from_modes(modes, lo, hi)?;
    FieldRealization::from_parts(set, amplitudes, seed, stream)
}

/// Writes `omega,power` rows.
pub fn write_periodogram_csv<W: Write>(periodogram: &Periodogram, mut out: W) -> Result<()> {
    writeln!(out, "omega,power")?;
    for (w, p) in periodogram.freqs.iter().zip(&periodogram.power) {
        writeln!(out, "{w:?},{p:?}")?;
    }
    Ok(())
}

/// Writes one row per frequency bin with the densities before and after the boost.
pub fn write_boost_csv<W: Write>(report: &BoostReport, mut out: W) -> Result<()> {
    writeln!(out, "omega_lo,omega_hi,density_before,density_after")?;
    for (b, a) in report.bins_before.iter().zip(&report.bins_after) {
        writeln!(
            out,
            "{:?},{:?},{:?},{:?}",
            b.omega_lo, b.omega_hi, b.density, a.density
        )?;
    }
    Ok(())
}
