//! Composite Gauss–Lobatto grids on [0, π].
//!
//! The interval is split into equal panels and each panel carries a
//! Gauss–Lobatto rule, so panel endpoints are genuine quadrature nodes with
//! positive weight and adjacent panels share their interface node. Besides
//! plain quadrature the grid provides cumulative Volterra integration with an
//! exponential convolution kernel e^{a(x−t)}. The kernel phase is factored
//! analytically per panel, so the routine stays accurate and overflow-free for
//! arbitrarily large |Im a| as long as |a|·(panel width) stays below about
//! π/2. `panels_for` picks a panel count that honours that bound.

use crate::{Complex, Error, Result};
use std::f64::consts::PI;

pub const DEFAULT_NODES_PER_PANEL: usize = 10;
pub const MIN_PANELS: usize = 64;

#[derive(Debug)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel_count: usize,
    nodes_per_panel: usize,
    panel_width: f64,
    ref_nodes: Vec<f64>,
    /// C[j*q + k] = ∫_{−1}^{s_j} ℓ_k(s) ds on the reference panel.
    cumulative: Vec<f64>,
}

impl Grid {
    pub fn new(panel_count: usize, nodes_per_panel: usize) -> Result<Grid> {
        if panel_count == 0 {
            return Err(Error::InvalidGrid("panel count must be positive".into()));
        }
        if !(2..=32).contains(&nodes_per_panel) {
            return Err(Error::InvalidGrid(format!(
                "nodes per panel must lie in 2..=32, got {nodes_per_panel}"
            )));
        }
        let q = nodes_per_panel;
        let (s, w) = gauss_lobatto(q);
        let h = PI / panel_count as f64;
        let n = panel_count * (q - 1) + 1;

        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for p in 0..panel_count {
            let base = p * (q - 1);
            let left = p as f64 * h;
            for j in 0..q {
                let idx = base + j;
                if j > 0 || p == 0 {
                    nodes[idx] = left + 0.5 * h * (s[j] + 1.0);
                }
                // interface nodes collect weight from both neighbouring panels
                weights[idx] += 0.5 * h * w[j];
            }
        }
        nodes[n - 1] = PI;

        Ok(Grid {
            nodes,
            weights,
            panel_count,
            nodes_per_panel: q,
            panel_width: h,
            cumulative: cumulative_matrix(&s),
            ref_nodes: s,
        })
    }

    /// Panel count that keeps the cumulative-kernel phase under π/2 per panel
    /// for kernels e^{±2iλ(x−t)}.
    pub fn panels_for(lambda: Complex) -> usize {
        let size = lambda.re.abs() + lambda.im.abs();
        MIN_PANELS.max(4 * size.ceil() as usize)
    }

    pub fn for_parameter(lambda: Complex) -> Grid {
        Grid::new(Self::panels_for(lambda), DEFAULT_NODES_PER_PANEL)
            .expect("automatic grid parameters are always valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panel_count(&self) -> usize {
        self.panel_count
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    /// Grids built from the same parameters are interchangeable.
    pub fn compatible(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other)
            || (self.panel_count == other.panel_count
                && self.nodes_per_panel == other.nodes_per_panel)
    }

    pub fn integrate(&self, values: &[Complex]) -> Complex {
        debug_assert_eq!(values.len(), self.len());
        self.weights
            .iter()
            .zip(values)
            .map(|(&w, &v)| w * v)
            .sum()
    }

    /// I(x_i) = ∫_0^{x_i} e^{a(x_i − t)} f(t) dt at every grid node.
    pub fn cumulative_forward(&self, a: Complex, f: &[Complex]) -> Vec<Complex> {
        debug_assert_eq!(f.len(), self.len());
        let q = self.nodes_per_panel;
        let ah = a * (0.5 * self.panel_width);
        let mat = self.phase_matrix(ah, false);
        let prop: Vec<Complex> = self
            .ref_nodes
            .iter()
            .map(|&s| (ah * (s + 1.0)).exp())
            .collect();

        let mut out = vec![Complex::new(0.0, 0.0); self.len()];
        for p in 0..self.panel_count {
            let base = p * (q - 1);
            let left = out[base];
            for j in 1..q {
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..q {
                    acc += mat[j * q + k] * f[base + k];
                }
                out[base + j] = prop[j] * left + acc;
            }
        }
        out
    }

    /// I(x_i) = ∫_{x_i}^π e^{a(x_i − t)} f(t) dt at every grid node.
    pub fn cumulative_backward(&self, a: Complex, f: &[Complex]) -> Vec<Complex> {
        debug_assert_eq!(f.len(), self.len());
        let q = self.nodes_per_panel;
        let ah = a * (0.5 * self.panel_width);
        let mat = self.phase_matrix(ah, true);
        let prop: Vec<Complex> = self
            .ref_nodes
            .iter()
            .map(|&s| (ah * (s - 1.0)).exp())
            .collect();

        let mut out = vec![Complex::new(0.0, 0.0); self.len()];
        for p in (0..self.panel_count).rev() {
            let base = p * (q - 1);
            let right = out[base + q - 1];
            for j in 0..q - 1 {
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..q {
                    acc += mat[j * q + k] * f[base + k];
                }
                out[base + j] = prop[j] * right + acc;
            }
        }
        out
    }

    /// q×q matrix (h/2)·e^{ah(s_j−s_k)}·C[j][k] (forward) or with the
    /// complementary integral ∫_{s_j}^1 (backward).
    fn phase_matrix(&self, ah: Complex, backward: bool) -> Vec<Complex> {
        let q = self.nodes_per_panel;
        let half = 0.5 * self.panel_width;
        let mut m = vec![Complex::new(0.0, 0.0); q * q];
        for j in 0..q {
            for k in 0..q {
                let c = if backward {
                    self.cumulative[(q - 1) * q + k] - self.cumulative[j * q + k]
                } else {
                    self.cumulative[j * q + k]
                };
                m[j * q + k] =
                    half * c * (ah * (self.ref_nodes[j] - self.ref_nodes[k])).exp();
            }
        }
        m
    }

    /// First derivative by sliding 7-point finite differences on the
    /// non-uniform node set.
    pub fn derivative(&self, values: &[Complex]) -> Vec<Complex> {
        debug_assert_eq!(values.len(), self.len());
        let n = self.len();
        let width = 7.min(n);
        let mut out = vec![Complex::new(0.0, 0.0); n];
        for i in 0..n {
            let start = i.saturating_sub(width / 2).min(n - width);
            let w = fd_weights_first(&self.nodes[start..start + width], self.nodes[i]);
            let mut acc = Complex::new(0.0, 0.0);
            for (m, &wm) in w.iter().enumerate() {
                acc += wm * values[start + m];
            }
            out[i] = acc;
        }
        out
    }
}

/// First-derivative finite-difference weights for an arbitrary stencil,
/// by Fornberg's recurrence.
pub fn fd_weights_first(nodes: &[f64], x0: f64) -> Vec<f64> {
    let n = nodes.len();
    assert!(n >= 2, "derivative stencil needs at least two nodes");
    const M: usize = 1;
    let mut c = vec![[0.0f64; M + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(M);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
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
    c.into_iter().map(|row| row[M]).collect()
}

/// (P_n(x), P'_n(x)) by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut pm = 1.0;
    let mut p = x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * p - k as f64 * pm) / (k + 1) as f64;
        pm = p;
        p = next;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-12 {
        let sign = if x > 0.0 {
            1.0
        } else {
            (-1.0f64).powi(n as i32 - 1)
        };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p - pm) / (x * x - 1.0)
    };
    (p, dp)
}

/// m-point Gauss–Legendre rule on [−1, 1].
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(m, x);
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// q-point Gauss–Lobatto rule on [−1, 1]: endpoints plus the roots of
/// P'_{q−1}, weights 2/(q(q−1)P_{q−1}(x)²).
fn gauss_lobatto(q: usize) -> (Vec<f64>, Vec<f64>) {
    let n = q - 1;
    let mut nodes = vec![0.0; q];
    nodes[0] = -1.0;
    nodes[q - 1] = 1.0;
    for i in 1..n {
        // Chebyshev–Lobatto starting point, then Newton on P'_n
        let mut x = (PI * (n - i) as f64 / n as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let ddp = (2.0 * x * dp - (n * (n + 1)) as f64 * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
    }
    let scale = 2.0 / (q * (q - 1)) as f64;
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre_pair(n, x);
            scale / (p * p)
        })
        .collect();
    (nodes, weights)
}

/// C[j][k] = ∫_{−1}^{s_j} ℓ_k(s) ds for the Lagrange basis on `s`, via the
/// Legendre expansion of each ℓ_k and the antiderivative
/// ∫_{−1}^x P_l = (P_{l+1} − P_{l−1})/(2l+1).
fn cumulative_matrix(s: &[f64]) -> Vec<f64> {
    let q = s.len();
    let (gx, gw) = gauss_legendre(2 * q);

    // lagrange[k][g]: ℓ_k evaluated at the auxiliary Gauss nodes
    let lagrange: Vec<Vec<f64>> = (0..q)
        .map(|k| {
            gx.iter()
                .map(|&x| {
                    let mut v = 1.0;
                    for m in 0..q {
                        if m != k {
                            v *= (x - s[m]) / (s[k] - s[m]);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();

    // coeff[k][l] of ℓ_k = Σ_l coeff·P_l
    let mut coeff = vec![vec![0.0; q]; q];
    for k in 0..q {
        for l in 0..q {
            let mut acc = 0.0;
            for (g, &x) in gx.iter().enumerate() {
                let (p, _) = legendre_pair(l, x);
                acc += gw[g] * lagrange[k][g] * p;
            }
            coeff[k][l] = (2 * l + 1) as f64 / 2.0 * acc;
        }
    }

    let mut c = vec![0.0; q * q];
    for j in 0..q {
        let x = s[j];
        for k in 0..q {
            let mut acc = coeff[k][0] * (x + 1.0);
            for l in 1..q {
                let (pp, _) = legendre_pair(l + 1, x);
                let (pm, _) = legendre_pair(l - 1, x);
                acc += coeff[k][l] * (pp - pm) / (2 * l + 1) as f64;
            }
            c[j * q + k] = acc;
        }
    }
    c
}
