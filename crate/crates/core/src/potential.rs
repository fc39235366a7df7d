use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

pub const MAX_DEGREE: usize = 8;

/// Polynomial potential `V(x) = sum_k c_k x^k` with `k <= 8`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    coefficients: Vec<f64>,
}

impl PotentialSpec {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() > MAX_DEGREE + 1 {
            return config_err(format!(
                "potential degree {} exceeds {MAX_DEGREE}",
                coefficients.len() - 1
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return config_err("potential coefficients must be finite");
        }
        let mut coefficients = coefficients;
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Ok(PotentialSpec { coefficients })
    }

    pub fn free() -> Self {
        PotentialSpec {
            coefficients: Vec::new(),
        }
    }

    /// `V = m omega^2 x^2 / 2`.
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        PotentialSpec {
            coefficients: vec![0.0, 0.0, 0.5 * mass * omega * omega],
        }
    }

    /// `V = lambda x^4`.
    pub fn quartic(lambda: f64) -> Self {
        PotentialSpec {
            coefficients: vec![0.0, 0.0, 0.0, 0.0, lambda],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Degree of the highest nonzero coefficient (0 for the free particle).
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn is_at_most_quadratic(&self) -> bool {
        self.coefficients.len() <= 3
    }

    /// Even leading power with a positive coefficient.
    pub fn is_confining(&self) -> bool {
        let d = self.degree();
        d >= 2 && d % 2 == 0 && self.coefficients[d] > 0.0
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `d^order V / dx^order` at `x`, by exact differentiation of the polynomial.
    pub fn derivative(&self, order: usize, x: f64) -> f64 {
        let mut acc = 0.0;
        for k in (order..self.coefficients.len()).rev() {
            acc = acc * x + self.coefficients[k] * falling_factorial(k, order);
        }
        acc
    }

    /// Coefficients of the `order`-th derivative as a new polynomial.
    pub fn derivative_coefficients(&self, order: usize) -> Vec<f64> {
        (order..self.coefficients.len())
            .map(|k| self.coefficients[k] * falling_factorial(k, order))
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PotentialSpec {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
        }
    }
}

/// `k (k-1) ... (k-order+1)`.
fn falling_factorial(k: usize, order: usize) -> f64 {
    ((k + 1 - order)..=k).map(|j| j as f64).product()
}

/// Conservative force `-V'(x)`.
pub fn drift_force(potential: &PotentialSpec, x: f64) -> f64 {
    -potential.derivative(1, x)
}
