use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result, SimError};
use crate::quantum_oracle::GaussianWignerParams;
use crate::stats::CompensatedSum;

/// Normalization tolerance enforced at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Relative magnitude allowed on the outer two cells of a valid state.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
/// Number of cells on each edge treated as the boundary ring.
pub const BOUNDARY_CELLS: usize = 2;

/// Uniform axis including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return config_err(format!(
                "axis bounds must satisfy min < max, got [{min}, {max}]"
            ));
        }
        if n < 2 * BOUNDARY_CELLS + 11 {
            return config_err(format!(
                "axis needs at least {} points, got {n}",
                2 * BOUNDARY_CELLS + 11
            ));
        }
        Ok(Axis { min, max, n })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }

    /// Trapezoid weight of point `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    /// Same range with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Self {
        Axis {
            min: self.min,
            max: self.max,
            n: (self.n - 1) * factor + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseAxis {
    X,
    P,
}

/// Phase-space quasi-density sampled on a rectangular grid.
///
/// Values are stored row-major with `x` as the slow index:
/// `values[i * n_p + j] = W(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    x_axis: Axis,
    p_axis: Axis,
    values: Vec<f64>,
}

impl WignerGrid {
    /// Wraps raw values after a shape check only.
    pub fn from_values(x_axis: Axis, p_axis: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != x_axis.n * p_axis.n {
            return config_err(format!(
                "grid has {} values, expected {}x{}",
                values.len(),
                x_axis.n,
                p_axis.n
            ));
        }
        Ok(WignerGrid {
            x_axis,
            p_axis,
            values,
        })
    }

    pub fn from_fn(x_axis: Axis, p_axis: Axis, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(x_axis.n * p_axis.n);
        for i in 0..x_axis.n {
            let x = x_axis.point(i);
            for j in 0..p_axis.n {
                values.push(f(x, p_axis.point(j)));
            }
        }
        WignerGrid {
            x_axis,
            p_axis,
            values,
        }
    }

    /// Samples a Gaussian and checks the grid invariants.
    pub fn gaussian(x_axis: Axis, p_axis: Axis, params: &GaussianWignerParams) -> Result<Self> {
        let grid = Self::from_fn(x_axis, p_axis, |x, p| params.density(x, p));
        grid.validate()?;
        Ok(grid)
    }

    pub fn x_axis(&self) -> Axis {
        self.x_axis
    }

    pub fn p_axis(&self) -> Axis {
        self.p_axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_axis.n + j]
    }

    pub fn cell_area(&self) -> f64 {
        self.x_axis.step() * self.p_axis.step()
    }

    /// Trapezoid integral of the grid values.
    pub fn total(&self) -> f64 {
        self.weighted_sum(|_, _, w| w)
    }

    fn weighted_sum(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let n_p = self.p_axis.n;
        let mut acc = CompensatedSum::new();
        for i in 0..self.x_axis.n {
            let x = self.x_axis.point(i);
            let wx = self.x_axis.weight(i);
            let mut row = CompensatedSum::new();
            for j in 0..n_p {
                let p = self.p_axis.point(j);
                row.add(self.p_axis.weight(j) * f(x, p, self.values[i * n_p + j]));
            }
            acc.add(wx * row.value());
        }
        acc.value()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn on_boundary(&self, i: usize, j: usize) -> bool {
        let b = BOUNDARY_CELLS;
        i < b || j < b || i + b >= self.x_axis.n || j + b >= self.p_axis.n
    }

    /// Largest |W| on the boundary ring.
    pub fn boundary_max(&self) -> f64 {
        let n_p = self.p_axis.n;
        let mut m = 0.0f64;
        for i in 0..self.x_axis.n {
            for j in 0..n_p {
                if self.on_boundary(i, j) {
                    m = m.max(self.values[i * n_p + j].abs());
                }
            }
        }
        m
    }

    /// Integral of |W| over the boundary ring, as a fraction of the total.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let n_p = self.p_axis.n;
        let mut ring = CompensatedSum::new();
        for i in 0..self.x_axis.n {
            for j in 0..n_p {
                if self.on_boundary(i, j) {
                    ring.add(
                        self.x_axis.weight(i)
                            * self.p_axis.weight(j)
                            * self.values[i * n_p + j].abs(),
                    );
                }
            }
        }
        ring.value() / self.total().abs()
    }

    pub fn check_boundary(&self) -> Result<()> {
        let edge = self.boundary_max();
        let peak = self.max_abs();
        if !(edge < BOUNDARY_TOLERANCE * peak) {
            return config_err(format!(
                "state is not contained in the box: boundary |W| = {edge:e} vs peak {peak:e}"
            ));
        }
        Ok(())
    }

    /// Checks normalization, finiteness and the boundary condition.
    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return config_err("grid contains non-finite values");
        }
        let total = self.total();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return config_err(format!("grid integrates to {total}, expected 1"));
        }
        self.check_boundary()
    }

    /// Largest pointwise difference to another grid on the same axes.
    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Trapezoid L2 distance to another grid on the same axes.
    pub fn l2_distance(&self, other: &WignerGrid) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        let diff = WignerGrid {
            x_axis: self.x_axis,
            p_axis: self.p_axis,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b) * (a - b))
                .collect(),
        };
        diff.total().sqrt()
    }
}

/// Distribution along `axis` after integrating out the other coordinate.
pub fn marginal(w: &WignerGrid, axis: PhaseAxis) -> Vec<f64> {
    let (nx, np) = (w.x_axis.n, w.p_axis.n);
    match axis {
        PhaseAxis::X => (0..nx)
            .map(|i| {
                (0..np)
                    .map(|j| w.p_axis.weight(j) * w.values[i * np + j])
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect(),
        PhaseAxis::P => (0..np)
            .map(|j| {
                (0..nx)
                    .map(|i| w.x_axis.weight(i) * w.values[i * np + j])
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect(),
    }
}

/// Highest total degree accepted for observables.
pub const MAX_OBSERVABLE_DEGREE: u32 = 6;

/// Sum of terms `coefficient * x^a * p^b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePolynomial {
    terms: Vec<(f64, u32, u32)>,
}

impl PhasePolynomial {
    pub fn new(terms: Vec<(f64, u32, u32)>) -> Result<Self> {
        if let Some(&(_, a, b)) = terms.iter().find(|(_, a, b)| a + b > MAX_OBSERVABLE_DEGREE) {
            return config_err(format!(
                "observable term x^{a} p^{b} exceeds degree {MAX_OBSERVABLE_DEGREE}"
            ));
        }
        Ok(PhasePolynomial { terms })
    }

    pub fn one() -> Self {
        PhasePolynomial {
            terms: vec![(1.0, 0, 0)],
        }
    }

    pub fn monomial(a: u32, b: u32) -> Result<Self> {
        Self::new(vec![(1.0, a, b)])
    }

    /// `p^2/2m + m ω^2 x^2 / 2`.
    pub fn harmonic_energy(mass: f64, omega: f64) -> Self {
        PhasePolynomial {
            terms: vec![(0.5 / mass, 0, 2), (0.5 * mass * omega * omega, 2, 0)],
        }
    }

    pub fn terms(&self) -> &[(f64, u32, u32)] {
        &self.terms
    }

    pub fn eval(&self, x: f64, p: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a, b)| c * x.powi(a as i32) * p.powi(b as i32))
            .sum()
    }
}

/// Trapezoid phase-space average of `obs`.
pub fn expectation(w: &WignerGrid, obs: &PhasePolynomial) -> f64 {
    w.weighted_sum(|x, p, v| obs.eval(x, p) * v)
}

/// Writes `x,p,w` rows after a header describing both axes.
pub fn write_grid_csv<W: Write>(grid: &WignerGrid, mut out: W) -> Result<()> {
    let (xa, pa) = (grid.x_axis, grid.p_axis);
    writeln!(out, "# x_axis={:?},{:?},{}", xa.min, xa.max, xa.n)?;
    writeln!(out, "# p_axis={:?},{:?},{}", pa.min, pa.max, pa.n)?;
    writeln!(out, "x,p,w")?;
    for i in 0..xa.n {
        let x = xa.point(i);
        for j in 0..pa.n {
            writeln!(out, "{:?},{:?},{:?}", x, pa.point(j), grid.get(i, j))?;
        }
    }
    Ok(())
}

fn parse_axis(spec: &str, line: usize) -> Result<Axis> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || SimError::Parse(format!("line {line}: malformed axis descriptor {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].parse().map_err(|_| bad())?;
    let max: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    Axis::new(min, max, n).map_err(|e| SimError::Parse(format!("line {line}: {e}")))
}

pub fn read_grid_csv<R: BufRead>(input: R) -> Result<WignerGrid> {
    let mut x_axis = None;
    let mut p_axis = None;
    let mut values = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("# x_axis=") {
            x_axis = Some(parse_axis(rest, lineno)?);
        } else if let Some(rest) = trimmed.strip_prefix("# p_axis=") {
            p_axis = Some(parse_axis(rest, lineno)?);
        } else if trimmed.starts_with('#') || trimmed == "x,p,w" {
            continue;
        } else {
            let w = trimmed
                .rsplit(',')
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| SimError::Parse(format!("line {lineno}: bad row {trimmed:?}")))?;
            values.push(w);
        }
    }
    let x_axis = x_axis.ok_or_else(|| SimError::Parse("missing x_axis header".into()))?;
    let p_axis = p_axis.ok_or_else(|| SimError::Parse("missing p_axis header".into()))?;
    WignerGrid::from_values(x_axis, p_axis, values).map_err(|e| SimError::Parse(e.to_string()))
}

/// Binary layout, all little-endian:
///
/// ```text
/// f64 x_min, f64 x_max, u64 n_x, f64 p_min, f64 p_max, u64 n_p,
/// then n_x * n_p f64 values in row-major order (x slow, p fast)
/// ```
pub fn write_grid_binary<W: Write>(grid: &WignerGrid, mut out: W) -> Result<()> {
    for axis in [grid.x_axis, grid.p_axis] {
        out.write_all(&axis.min.to_le_bytes())?;
        out.write_all(&axis.max.to_le_bytes())?;
        out.write_all(&(axis.n as u64).to_le_bytes())?;
    }
    for v in &grid.values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid_binary<R: Read>(mut input: R) -> Result<WignerGrid> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8]> {
        input
            .read_exact(&mut word)
            .map_err(|e| SimError::Parse(format!("truncated grid file: {e}")))?;
        Ok(word)
    };
    let mut axes = Vec::with_capacity(2);
    for _ in 0..2 {
        let min = f64::from_le_bytes(next(&mut input)?);
        let max = f64::from_le_bytes(next(&mut input)?);
        let n = u64::from_le_bytes(next(&mut input)?) as usize;
        axes.push(Axis::new(min, max, n).map_err(|e| SimError::Parse(e.to_string()))?);
    }
    let count = axes[0].n * axes[1].n;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_le_bytes(next(&mut input)?));
    }
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(SimError::Parse("trailing bytes after grid values".into()));
    }
    WignerGrid::from_values(axes[0], axes[1], values)
}
