use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::WignerGrid;
use super::stencil::{EdgeClosure, Stencil};
use crate::error::{config_err, Result};
use crate::potential::PotentialSpec;

/// `H = p^2/2m + V(x)` with the value of ħ used by the quantum corrections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub mass: f64,
    pub potential: PotentialSpec,
    pub hbar: f64,
}

impl HamiltonianSpec {
    pub fn new(mass: f64, potential: PotentialSpec, hbar: f64) -> Result<Self> {
        let h = HamiltonianSpec {
            mass,
            potential,
            hbar,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return config_err(format!("mass must be positive, got {}", self.mass));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return config_err(format!("hbar must be positive, got {}", self.hbar));
        }
        Ok(())
    }

    /// Classical energy at a phase-space point.
    pub fn energy(&self, x: f64, p: f64) -> f64 {
        0.5 * p * p / self.mass + self.potential.value(x)
    }
}

/// Highest series index kept in the Moyal expansion. Zero is the Liouville flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoyalOrder(u8);

impl MoyalOrder {
    pub const MAX: u8 = 3;
    pub const LIOUVILLE: MoyalOrder = MoyalOrder(0);

    pub fn new(n_max: u8) -> Result<Self> {
        if n_max > Self::MAX {
            return config_err(format!(
                "Moyal order must be in 0..={}, got {n_max}",
                Self::MAX
            ));
        }
        Ok(MoyalOrder(n_max))
    }

    pub fn n_max(self) -> u8 {
        self.0
    }
}

/// Coefficient `(-1)^n (ħ/2)^{2n} / (2n+1)!` of the n-th correction.
pub fn series_coefficient(n: u32, hbar: f64) -> f64 {
    let factorial: f64 = (1..=(2 * n + 1)).map(f64::from).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * (0.5 * hbar).powi(2 * n as i32) / factorial
}

/// One correction term whose potential derivative is not identically zero.
#[derive(Debug, Clone)]
pub(crate) struct CorrectionTerm {
    pub stencil: Stencil,
    /// Coefficient times `V^{(2n+1)}(x_i)`, one per x point.
    pub row_factor: Vec<f64>,
}

/// Everything `moyal_rhs` needs that does not depend on `W`.
#[derive(Debug, Clone)]
pub(crate) struct MoyalOperator {
    d1: Stencil,
    /// `-p_j / (m Δx)` per p point.
    drift: Vec<f64>,
    /// `V'(x_i) / Δp` per x point.
    kick: Vec<f64>,
    pub corrections: Vec<CorrectionTerm>,
    closure: EdgeClosure,
    n_x: usize,
    n_p: usize,
}

impl MoyalOperator {
    pub fn new(
        grid: &WignerGrid,
        ham: &HamiltonianSpec,
        order: MoyalOrder,
        closure: EdgeClosure,
    ) -> Self {
        let (xa, pa) = (grid.x_axis(), grid.p_axis());
        let (dx, dp) = (xa.step(), pa.step());
        let xs = xa.points();
        let drift = pa.points().iter().map(|p| -p / (ham.mass * dx)).collect();
        let kick = xs
            .iter()
            .map(|&x| ham.potential.derivative(1, x) / dp)
            .collect();
        let corrections = (1..=u32::from(order.n_max()))
            .filter(|&n| ham.potential.degree() >= (2 * n + 1) as usize)
            .map(|n| {
                let k = (2 * n + 1) as usize;
                let c = series_coefficient(n, ham.hbar) / dp.powi(k as i32);
                CorrectionTerm {
                    stencil: Stencil::new(k),
                    row_factor: xs
                        .iter()
                        .map(|&x| c * ham.potential.derivative(k, x))
                        .collect(),
                }
            })
            .collect();
        MoyalOperator {
            d1: Stencil::new(1),
            drift,
            kick,
            corrections,
            closure,
            n_x: xa.n,
            n_p: pa.n,
        }
    }

    /// Writes `∂W/∂t` for `values` into `out`. Rows are independent, so the
    /// result does not depend on how rayon splits them.
    pub fn apply(&self, values: &[f64], out: &mut [f64]) {
        let (n_x, n_p, closure) = (self.n_x, self.n_p, self.closure);
        out.par_chunks_mut(n_p)
            .enumerate()
            .for_each(|(i, row_out)| {
                let row = &values[i * n_p..(i + 1) * n_p];
                let kick = self.kick[i];
                for (j, o) in row_out.iter_mut().enumerate() {
                    let dwdx = self.d1.apply_at(closure, n_x, i, |k| values[k * n_p + j]);
                    let dwdp = self.d1.apply_at(closure, n_p, j, |k| row[k]);
                    let mut acc = self.drift[j] * dwdx + kick * dwdp;
                    for term in &self.corrections {
                        acc +=
                            term.row_factor[i] * term.stencil.apply_at(closure, n_p, j, |k| row[k]);
                    }
                    *o = acc;
                }
            });
    }
}

/// Time derivative of `w` under the Moyal series truncated at `order`.
pub fn moyal_rhs(w: &WignerGrid, ham: &HamiltonianSpec, order: MoyalOrder) -> Result<WignerGrid> {
    moyal_rhs_with_closure(w, ham, order, EdgeClosure::default())
}

pub fn moyal_rhs_with_closure(
    w: &WignerGrid,
    ham: &HamiltonianSpec,
    order: MoyalOrder,
    closure: EdgeClosure,
) -> Result<WignerGrid> {
    ham.validate()?;
    let op = MoyalOperator::new(w, ham, order, closure);
    let mut out = vec![0.0; w.values().len()];
    op.apply(w.values(), &mut out);
    WignerGrid::from_values(w.x_axis(), w.p_axis(), out)
}
