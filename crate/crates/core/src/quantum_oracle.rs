//! Closed-form and brute-force quantum references.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{config_err, Result, SimError};

/// Gaussian Wigner function given by its first and second moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianWignerParams {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
}

impl GaussianWignerParams {
    /// Centered, uncorrelated Gaussian.
    pub fn centered(var_x: f64, var_p: f64) -> Self {
        GaussianWignerParams {
            mean_x: 0.0,
            mean_p: 0.0,
            var_x,
            var_p,
            cov_xp: 0.0,
        }
    }

    pub fn displaced(self, mean_x: f64, mean_p: f64) -> Self {
        GaussianWignerParams {
            mean_x,
            mean_p,
            ..self
        }
    }

    /// Determinant of the covariance matrix (the squared symplectic area).
    pub fn determinant(&self) -> f64 {
        self.var_x * self.var_p - self.cov_xp * self.cov_xp
    }

    /// Rejects covariances that violate `det >= (hbar/2)^2`.
    pub fn validate(&self, hbar: f64) -> Result<()> {
        if !(self.var_x > 0.0 && self.var_p > 0.0) {
            return config_err("Gaussian variances must be positive");
        }
        let bound = 0.25 * hbar * hbar;
        if self.determinant() < bound - 1e-12 {
            return config_err(format!(
                "uncertainty relation violated: det = {} < (hbar/2)^2 = {bound}",
                self.determinant()
            ));
        }
        Ok(())
    }

    pub fn density(&self, x: f64, p: f64) -> f64 {
        let det = self.determinant();
        let (dx, dp) = (x - self.mean_x, p - self.mean_p);
        let q = (self.var_p * dx * dx - 2.0 * self.cov_xp * dx * dp + self.var_x * dp * dp) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }

    /// Map two standard normals to a draw from this Gaussian (Cholesky factor).
    pub fn sample_from_normals(&self, z1: f64, z2: f64) -> (f64, f64) {
        let l11 = self.var_x.sqrt();
        let l21 = self.cov_xp / l11;
        let l22 = (self.var_p - l21 * l21).max(0.0).sqrt();
        (self.mean_x + l11 * z1, self.mean_p + l21 * z1 + l22 * z2)
    }

    /// `<p^2>/2m + m w^2 <x^2>/2`.
    pub fn harmonic_energy(&self, mass: f64, omega: f64) -> f64 {
        (self.var_p + self.mean_p * self.mean_p) / (2.0 * mass)
            + 0.5 * mass * omega * omega * (self.var_x + self.mean_x * self.mean_x)
    }
}

/// Vacuum Wigner function of one field mode in the coordinates `(y, q)`:
/// `var_y = hbar/(2w)`, `var_q = hbar w/2`.
pub fn vacuum_wigner_mode(omega: f64, hbar: f64) -> GaussianWignerParams {
    GaussianWignerParams::centered(hbar / (2.0 * omega), hbar * omega / 2.0)
}

/// Ground state of `p^2/2m + m w^2 x^2/2`.
pub fn oscillator_ground_oracle(mass: f64, omega: f64, hbar: f64) -> GaussianWignerParams {
    GaussianWignerParams::centered(hbar / (2.0 * mass * omega), mass * hbar * omega / 2.0)
}

/// Exact harmonic phase flow applied to the moments.
pub fn rotate_gaussian(
    params: &GaussianWignerParams,
    mass: f64,
    omega: f64,
    t: f64,
) -> GaussianWignerParams {
    let (s, c) = (omega * t).sin_cos();
    let mw = mass * omega;
    // [x', p'] = M [x, p]
    let m = [[c, s / mw], [-mw * s, c]];
    let mean_x = m[0][0] * params.mean_x + m[0][1] * params.mean_p;
    let mean_p = m[1][0] * params.mean_x + m[1][1] * params.mean_p;
    let sigma = [[params.var_x, params.cov_xp], [params.cov_xp, params.var_p]];
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| m[i][a] * sigma[a][b] * m[j][b])
                .sum();
        }
    }
    GaussianWignerParams {
        mean_x,
        mean_p,
        var_x: out[0][0],
        var_p: out[1][1],
        cov_xp: 0.5 * (out[0][1] + out[1][0]),
    }
}

/// Ground-state values of an anharmonic oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnharmonicGround {
    pub energy: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `<x^4>`, kept for the virial check.
    pub mean_x4: f64,
    pub basis_size: usize,
}

const MAX_BASIS: usize = 1280;
const CONVERGENCE_TOL: f64 = 1e-8;

/// Ground state of `p^2/2 + lambda x^4` (unit mass).
pub fn quartic_ground_oracle(
    lambda: f64,
    hbar: f64,
    basis_size: usize,
) -> Result<AnharmonicGround> {
    anharmonic_ground_oracle(0.0, lambda, hbar, basis_size)
}

/// Ground state of `p^2/2 + k2 x^2/2 + lambda x^4` (unit mass) by dense
/// diagonalization in a harmonic-oscillator basis. The basis is doubled until
/// the energy changes by less than `1e-8`; the values from the larger basis
/// are returned.
pub fn anharmonic_ground_oracle(
    k2: f64,
    lambda: f64,
    hbar: f64,
    basis_size: usize,
) -> Result<AnharmonicGround> {
    if !(lambda > 0.0) {
        return config_err(format!(
            "quartic coefficient must be positive, got {lambda}"
        ));
    }
    if !(hbar > 0.0) || k2 < 0.0 {
        return config_err("hbar must be positive and k2 non-negative");
    }
    if basis_size < 40 {
        return config_err(format!("basis_size must be at least 40, got {basis_size}"));
    }
    let omega_b = variational_frequency(k2, lambda, hbar);
    let mut n = basis_size;
    let mut previous = diagonalize(k2, lambda, hbar, omega_b, n);
    while 2 * n <= MAX_BASIS {
        n *= 2;
        let next = diagonalize(k2, lambda, hbar, omega_b, n);
        if (next.energy - previous.energy).abs() < CONVERGENCE_TOL {
            return Ok(next);
        }
        previous = next;
    }
    Err(SimError::Convergence(format!(
        "ground energy not converged at basis size {n}"
    )))
}

/// Basis frequency minimizing the Gaussian trial energy
/// `hbar w/4 + k2 hbar/(4w) + 3 lambda hbar^2/(4 w^2)`.
fn variational_frequency(k2: f64, lambda: f64, hbar: f64) -> f64 {
    let energy = |w: f64| {
        hbar * w / 4.0 + k2 * hbar / (4.0 * w) + 3.0 * lambda * hbar * hbar / (4.0 * w * w)
    };
    let (mut a, mut b) = ((1e-4f64).ln(), (1e4f64).ln());
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if energy(c.exp()) < energy(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    (0.5 * (a + b)).exp()
}

fn diagonalize(k2: f64, lambda: f64, hbar: f64, omega_b: f64, n: usize) -> AnharmonicGround {
    // Position operator on a padded basis so that x^2 and x^4 are exact on the first n states.
    let big = n + 4;
    let scale = (hbar / (2.0 * omega_b)).sqrt();
    let mut x = DMatrix::<f64>::zeros(big, big);
    for j in 1..big {
        let v = scale * (j as f64).sqrt();
        x[(j - 1, j)] = v;
        x[(j, j - 1)] = v;
    }
    let x2_big = &x * &x;
    let x4_big = &x2_big * &x2_big;
    let x2 = x2_big.view((0, 0), (n, n)).into_owned();
    let x4 = x4_big.view((0, 0), (n, n)).into_owned();

    let mut h = &x2 * (0.5 * (k2 - omega_b * omega_b)) + &x4 * lambda;
    for j in 0..n {
        h[(j, j)] += hbar * omega_b * (j as f64 + 0.5);
    }
    let eig = SymmetricEigen::new(h);
    let (imin, energy) =
        eig.eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, e)| if e < acc.1 { (i, e) } else { acc },
            );
    let psi = eig.eigenvectors.column(imin);
    let expect = |op: &DMatrix<f64>| psi.dot(&(op * psi));
    let mean_x2 = expect(&x2);
    let mean_x4 = expect(&x4);
    let mean_x = psi.dot(&(x.view((0, 0), (n, n)) * psi));
    // <p^2> = 2 (E - k2 <x^2>/2 - lambda <x^4>)
    let mean_p2 = 2.0 * (energy - 0.5 * k2 * mean_x2 - lambda * mean_x4);
    AnharmonicGround {
        energy,
        var_x: mean_x2 - mean_x * mean_x,
        var_p: mean_p2,
        mean_x4,
        basis_size: n,
    }
}
