//! Two-component functions on [0, π], the ℍ = L₂ ⊕ L₂ inner product, and
//! spectral-parameter bookkeeping for the two half-planes Ω₊ and Ω₋.

use crate::grid::Grid;
use crate::logmag::LogMagnitude;
use crate::{Complex, Error, Result, R_OVERLAP};
use std::f64::consts::PI;
use std::sync::Arc;

/// Which asymptotic representation a solve uses. The two regions overlap in
/// the band |Im λ| < R_OVERLAP, so both tags are legal there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    pub fn label(self) -> &'static str {
        match self {
            HalfPlane::Upper => "upper",
            HalfPlane::Lower => "lower",
        }
    }

    pub fn contains(self, tau: f64) -> bool {
        match self {
            HalfPlane::Upper => tau > -R_OVERLAP,
            HalfPlane::Lower => tau < R_OVERLAP,
        }
    }

    pub fn natural(tau: f64) -> HalfPlane {
        if tau >= 0.0 {
            HalfPlane::Upper
        } else {
            HalfPlane::Lower
        }
    }

    pub fn mirror(self) -> HalfPlane {
        match self {
            HalfPlane::Upper => HalfPlane::Lower,
            HalfPlane::Lower => HalfPlane::Upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub lambda: Complex,
    pub half_plane: HalfPlane,
}

impl SpectralParameter {
    pub fn new(lambda: Complex, half_plane: HalfPlane) -> Result<SpectralParameter> {
        if !half_plane.contains(lambda.im) {
            return Err(Error::HalfPlaneDomain {
                tau: lambda.im,
                half_plane: half_plane.label(),
            });
        }
        Ok(SpectralParameter { lambda, half_plane })
    }

    /// Picks the natural half-plane for the sign of Im λ.
    pub fn auto(lambda: Complex) -> SpectralParameter {
        SpectralParameter {
            lambda,
            half_plane: HalfPlane::natural(lambda.im),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.lambda.re
    }

    pub fn tau(&self) -> f64 {
        self.lambda.im
    }
}

/// A pair of complex-valued functions sampled on a shared grid.
#[derive(Debug, Clone)]
pub struct GridFunction2 {
    grid: Arc<Grid>,
    pub component1: Vec<Complex>,
    pub component2: Vec<Complex>,
}

impl GridFunction2 {
    pub fn new(grid: Arc<Grid>, component1: Vec<Complex>, component2: Vec<Complex>) -> Result<Self> {
        if component1.len() != grid.len() || component2.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "component lengths {}/{} do not match grid size {}",
                component1.len(),
                component2.len(),
                grid.len()
            )));
        }
        Ok(GridFunction2 {
            grid,
            component1,
            component2,
        })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        GridFunction2 {
            grid,
            component1: vec![Complex::new(0.0, 0.0); n],
            component2: vec![Complex::new(0.0, 0.0); n],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> (Complex, Complex)) -> Self {
        let (component1, component2) = grid.nodes().iter().map(|&x| f(x)).unzip();
        GridFunction2 {
            grid,
            component1,
            component2,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn at(&self, idx: usize) -> (Complex, Complex) {
        (self.component1[idx], self.component2[idx])
    }

    pub fn at_zero(&self) -> (Complex, Complex) {
        self.at(0)
    }

    pub fn at_pi(&self) -> (Complex, Complex) {
        self.at(self.len() - 1)
    }

    /// ⟨f, g⟩ = ∫₀^π (f₁ḡ₁ + f₂ḡ₂) dx, conjugate-linear in g.
    pub fn inner_product(&self, other: &GridFunction2) -> Result<Complex> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::DistinctGrids);
        }
        let mut acc = Complex::new(0.0, 0.0);
        for (i, &w) in self.grid.weights().iter().enumerate() {
            acc += w
                * (self.component1[i] * other.component1[i].conj()
                    + self.component2[i] * other.component2[i].conj());
        }
        Ok(acc)
    }

    /// ℍ norm, sqrt of the self inner product. Tiny negative round-off in the
    /// real part is clamped to zero.
    pub fn h_norm(&self) -> LogMagnitude {
        let ip = self
            .inner_product(self)
            .expect("self inner product shares its own grid");
        let sq = ip.re.max(0.0);
        if sq == 0.0 {
            return LogMagnitude::ZERO;
        }
        LogMagnitude::from_log(0.5 * sq.ln())
    }

    /// L₂ norm of a single component (1 or 2).
    pub fn component_norm(&self, which: usize) -> LogMagnitude {
        let comp = match which {
            1 => &self.component1,
            2 => &self.component2,
            _ => panic!("component index must be 1 or 2"),
        };
        let sq: f64 = self
            .grid
            .weights()
            .iter()
            .zip(comp)
            .map(|(&w, v)| w * v.norm_sqr())
            .sum();
        if sq <= 0.0 {
            return LogMagnitude::ZERO;
        }
        LogMagnitude::from_log(0.5 * sq.ln())
    }

    pub fn scale(&self, c: Complex) -> GridFunction2 {
        GridFunction2 {
            grid: self.grid.clone(),
            component1: self.component1.iter().map(|&v| c * v).collect(),
            component2: self.component2.iter().map(|&v| c * v).collect(),
        }
    }

    /// self + c·other.
    pub fn add_scaled(&self, c: Complex, other: &GridFunction2) -> Result<GridFunction2> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::DistinctGrids);
        }
        let component1 = self
            .component1
            .iter()
            .zip(&other.component1)
            .map(|(&a, &b)| a + c * b)
            .collect();
        let component2 = self
            .component2
            .iter()
            .zip(&other.component2)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Ok(GridFunction2 {
            grid: self.grid.clone(),
            component1,
            component2,
        })
    }

    pub fn sub(&self, other: &GridFunction2) -> Result<GridFunction2> {
        self.add_scaled(Complex::new(-1.0, 0.0), other)
    }

    /// Pointwise sup of the Euclidean node magnitude sqrt(|f₁|² + |f₂|²).
    pub fn sup(&self) -> f64 {
        self.component1
            .iter()
            .zip(&self.component2)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).sqrt())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSign {
    Plus,
    Minus,
}

/// Closed-form L₂(0,π) norm of e^{±iλt}, in log scale.
///
/// For sign +: ‖e^{iλt}‖ = sqrt((1 − e^{−2πτ})/(2τ)), limit sqrt(π) at τ = 0;
/// sign − is the same expression with τ negated. Evaluated without ever
/// forming e^{2πτ} in linear scale.
pub fn exp_l2_norm(param: &SpectralParameter, sign: PhaseSign) -> LogMagnitude {
    let u = match sign {
        PhaseSign::Plus => param.tau(),
        PhaseSign::Minus => -param.tau(),
    };
    let log_sq = if u == 0.0 {
        PI.ln()
    } else if u > 0.0 {
        // (1 − e^{−2πu})/(2u), numerator via expm1 for small u
        (-(-2.0 * PI * u).exp_m1()).ln() - (2.0 * u).ln()
    } else {
        // (e^{2πw} − 1)/(2w) with w = −u > 0; ln(e^a − 1) = a + ln(1 − e^{−a})
        let w = -u;
        let a = 2.0 * PI * w;
        let log_num = if a > 0.5 {
            a + (-(-a).exp()).ln_1p()
        } else {
            a.exp_m1().ln()
        };
        log_num - (2.0 * w).ln()
    };
    LogMagnitude::from_log(0.5 * log_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(16, 10).unwrap())
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn constant_inner_products() {
        let g = grid();
        let e1 = GridFunction2::from_fn(g.clone(), |_| (c(1.0, 0.0), c(0.0, 0.0)));
        let e2 = GridFunction2::from_fn(g.clone(), |_| (c(0.0, 0.0), c(1.0, 0.0)));
        assert!((e1.inner_product(&e1).unwrap() - c(PI, 0.0)).norm() < 1e-13);
        assert!(e1.inner_product(&e2).unwrap().norm() < 1e-14);

        // full period of e^{2ix} integrates to zero
        let osc = GridFunction2::from_fn(g, |x| (c(0.0, 2.0 * x).exp(), c(0.0, 0.0)));
        assert!(osc.inner_product(&e1).unwrap().norm() < 1e-13);
    }

    #[test]
    fn h_norm_examples() {
        let g = grid();
        let ones = GridFunction2::from_fn(g.clone(), |_| (c(1.0, 0.0), c(1.0, 0.0)));
        let sqrt_2pi = (2.0 * PI).sqrt();
        assert!((ones.h_norm().to_linear() - sqrt_2pi).abs() < 1e-12);

        let zero = GridFunction2::zeros(g.clone());
        assert!(zero.h_norm().is_zero());

        let unimod = GridFunction2::from_fn(g, |x| {
            (c(0.0, x).exp(), c(0.0, -x).exp())
        });
        assert!((unimod.h_norm().to_linear() - sqrt_2pi).abs() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let f = GridFunction2::zeros(grid());
        let other = GridFunction2::zeros(Arc::new(Grid::new(8, 10).unwrap()));
        assert!(matches!(
            f.inner_product(&other),
            Err(Error::DistinctGrids)
        ));
    }

    #[test]
    fn oscillatory_quadrature_across_resolved_frequencies() {
        // ∫₀^π e^{iωx} dx for every integer ω the default panel budget resolves
        let g = grid(); // 16 panels ⇒ phase bound ω ≤ 2·16/4 = 8 stays well inside
        let one = GridFunction2::from_fn(g.clone(), |_| (c(1.0, 0.0), c(0.0, 0.0)));
        for omega in -8..=8 {
            let w = f64::from(omega);
            let f = GridFunction2::from_fn(g.clone(), |x| (c(0.0, w * x).exp(), c(0.0, 0.0)));
            let exact = if omega == 0 {
                c(PI, 0.0)
            } else {
                (c(0.0, w * PI).exp() - 1.0) / c(0.0, w)
            };
            assert!((f.inner_product(&one).unwrap() - exact).norm() < 1e-10);
        }
    }

    #[test]
    fn half_plane_validation() {
        assert!(SpectralParameter::new(c(3.0, 2.0), HalfPlane::Upper).is_ok());
        // the overlap band admits both tags
        assert!(SpectralParameter::new(c(3.0, -0.5), HalfPlane::Upper).is_ok());
        assert!(SpectralParameter::new(c(3.0, 0.5), HalfPlane::Lower).is_ok());
        assert!(matches!(
            SpectralParameter::new(c(3.0, -2.0), HalfPlane::Upper),
            Err(Error::HalfPlaneDomain { .. })
        ));
        assert!(matches!(
            SpectralParameter::new(c(3.0, 2.0), HalfPlane::Lower),
            Err(Error::HalfPlaneDomain { .. })
        ));
        assert_eq!(SpectralParameter::auto(c(1.0, -3.0)).half_plane, HalfPlane::Lower);
    }

    #[test]
    fn exp_norm_frozen_values() {
        let tau1 = SpectralParameter::auto(c(5.0, 1.0));
        let plus = exp_l2_norm(&tau1, PhaseSign::Plus).to_linear();
        assert!((plus - 0.70644623194843781798).abs() < 1e-14);
        let minus = exp_l2_norm(&tau1, PhaseSign::Minus).to_linear();
        assert!((minus - 16.347655115103889671).abs() < 1e-12);

        // τ = 0 is the hard-coded analytic limit sqrt(π)
        let real = SpectralParameter::auto(c(7.0, 0.0));
        assert!((exp_l2_norm(&real, PhaseSign::Plus).to_linear() - PI.sqrt()).abs() < 1e-15);

        // sign − at τ equals sign + at −τ
        let down = SpectralParameter::auto(c(5.0, -1.0));
        assert!(
            (exp_l2_norm(&down, PhaseSign::Plus).log_value
                - exp_l2_norm(&tau1, PhaseSign::Minus).log_value)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn exp_norm_no_overflow_at_large_tau() {
        let big = SpectralParameter::auto(c(0.0, 200.0));
        let v = exp_l2_norm(&big, PhaseSign::Minus);
        let expect = 0.5 * (400.0 * PI - (400.0f64).ln());
        assert!((v.log_value - expect).abs() < 1e-9);
        assert!(v.log_value.is_finite());
    }

    #[test]
    fn exp_norm_matches_quadrature() {
        let g = Arc::new(Grid::new(64, 10).unwrap());
        for &tau in &[0.25, 1.0, -2.0] {
            let p = SpectralParameter::auto(c(3.0, tau));
            let sampled = GridFunction2::from_fn(g.clone(), |x| {
                ((Complex::new(0.0, 1.0) * p.lambda * x).exp(), c(0.0, 0.0))
            });
            let closed = exp_l2_norm(&p, PhaseSign::Plus).to_linear();
            let measured = sampled.h_norm().to_linear();
            assert!((measured - closed).abs() < 1e-9 * closed);
        }
    }

    proptest! {
        #[test]
        fn inner_product_linearity_and_symmetry(
            ar in -2.0..2.0f64, ai in -2.0..2.0f64,
            br in -2.0..2.0f64, bi in -2.0..2.0f64,
        ) {
            let g = grid();
            let a = c(ar, ai);
            let b = c(br, bi);
            let f = GridFunction2::from_fn(g.clone(), |x| (c(x.sin(), 0.2 * x), c(0.3, x.cos())));
            let gfun = GridFunction2::from_fn(g.clone(), |x| (c(0.0, 1.5 * x).exp(), c(x, -0.1)));
            let h = GridFunction2::from_fn(g, |x| (c(1.0, -x), c(x * x, 0.4)));

            // additivity + homogeneity in the first argument
            let combo = f.scale(a).add_scaled(b, &gfun).unwrap();
            let lhs = combo.inner_product(&h).unwrap();
            let rhs = a * f.inner_product(&h).unwrap() + b * gfun.inner_product(&h).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);

            // conjugate symmetry
            let fg = f.inner_product(&gfun).unwrap();
            let gf = gfun.inner_product(&f).unwrap();
            prop_assert!((fg - gf.conj()).norm() < 1e-13);
        }
    }
}
