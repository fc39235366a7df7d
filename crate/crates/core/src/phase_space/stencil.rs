//! Finite-difference stencils for odd derivatives at fourth-order accuracy.
//!
//! Interior points use the centered stencils below. Near an edge the
//! operator either treats the function as zero beyond the grid or switches
//! to a one-sided stencil of the same width, with weights from Fornberg's
//! recursion.

/// First derivative, 5 points.
pub const D1: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
/// Third derivative, 7 points.
pub const D3: [f64; 7] = [
    1.0 / 8.0,
    -1.0,
    13.0 / 8.0,
    0.0,
    -13.0 / 8.0,
    1.0,
    -1.0 / 8.0,
];
/// Fifth derivative, 9 points.
pub const D5: [f64; 9] = [
    1.0 / 6.0,
    -3.0 / 2.0,
    13.0 / 3.0,
    -29.0 / 6.0,
    0.0,
    29.0 / 6.0,
    -13.0 / 3.0,
    3.0 / 2.0,
    -1.0 / 6.0,
];
/// Seventh derivative, 11 points.
pub const D7: [f64; 11] = [
    5.0 / 24.0,
    -13.0 / 6.0,
    69.0 / 8.0,
    -17.0,
    63.0 / 4.0,
    0.0,
    -63.0 / 4.0,
    17.0,
    -69.0 / 8.0,
    13.0 / 6.0,
    -5.0 / 24.0,
];

/// How a stencil is completed within its half-width of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeClosure {
    /// Values beyond the grid are zero. The discrete operator stays
    /// antisymmetric, so advection by it is neutrally stable.
    #[default]
    ZeroExtension,
    /// Fourth-order one-sided stencils. Accurate on smooth data but not
    /// stable for transport entering through an edge.
    OneSided,
}

/// Fornberg weights for the `order`-th derivative at `z` from values at `nodes`.
pub fn fornberg_weights(order: usize, z: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Derivative operator with edge closures for a grid of fixed length.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub order: usize,
    half_width: usize,
    central: Vec<f64>,
    /// `edge[i]` holds weights over points `0..width` for evaluating at point `i < half_width`.
    edge: Vec<Vec<f64>>,
}

impl Stencil {
    pub fn new(order: usize) -> Self {
        let central: Vec<f64> = match order {
            1 => D1.to_vec(),
            3 => D3.to_vec(),
            5 => D5.to_vec(),
            7 => D7.to_vec(),
            _ => panic!("no stencil for derivative order {order}"),
        };
        let width = central.len();
        let half_width = width / 2;
        let nodes: Vec<f64> = (0..width).map(|k| k as f64).collect();
        let edge = (0..half_width)
            .map(|i| fornberg_weights(order, i as f64, &nodes))
            .collect();
        Stencil {
            order,
            half_width,
            central,
            edge,
        }
    }

    pub fn width(&self) -> usize {
        self.central.len()
    }

    pub fn central(&self) -> &[f64] {
        &self.central
    }

    /// Largest modulus of the stencil's Fourier symbol, in units of `1/h^order`.
    pub fn symbol_bound(&self) -> f64 {
        let r = self.half_width as f64;
        (0..=2000)
            .map(|k| {
                let theta = std::f64::consts::PI * k as f64 / 2000.0;
                self.central
                    .iter()
                    .enumerate()
                    .map(|(m, w)| w * ((m as f64 - r) * theta).sin())
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    /// Derivative of `f` at index `i` of a strided line of `n` points.
    /// `at(k)` reads the `k`-th point of the line. The result is not scaled by `h`.
    #[inline]
    pub fn apply_at(
        &self,
        closure: EdgeClosure,
        n: usize,
        i: usize,
        at: impl Fn(usize) -> f64,
    ) -> f64 {
        let r = self.half_width;
        let w = self.central.len();
        if i >= r && i + r < n {
            let base = i - r;
            self.central
                .iter()
                .enumerate()
                .map(|(k, c)| c * at(base + k))
                .sum()
        } else if closure == EdgeClosure::ZeroExtension {
            self.central
                .iter()
                .enumerate()
                .filter_map(|(k, c)| {
                    let idx = (i + k).checked_sub(r).filter(|&idx| idx < n)?;
                    Some(c * at(idx))
                })
                .sum()
        } else if i < r {
            self.edge[i]
                .iter()
                .enumerate()
                .map(|(k, c)| c * at(k))
                .sum()
        } else {
            // Mirror the left closure: odd derivatives flip sign under reflection.
            let mirrored = n - 1 - i;
            let base = n - w;
            self.edge[mirrored]
                .iter()
                .enumerate()
                .map(|(k, c)| -c * at(base + (w - 1 - k)))
                .sum()
        }
    }

    /// Derivative of a contiguous line.
    pub fn apply_line(&self, closure: EdgeClosure, values: &[f64], h: f64, out: &mut [f64]) {
        let n = values.len();
        let scale = h.powi(-(self.order as i32));
        for (i, o) in out.iter_mut().enumerate() {
            *o = scale * self.apply_at(closure, n, i, |k| values[k]);
        }
    }
}
