//! Two-point boundary value problems: characteristic determinant, eigenvalue
//! search by argument-principle winding counts over rectangles, eigenfunction
//! extraction, adjoint boundary conditions, and biorthogonal normalization.
//!
//! Boundary values are ordered (y₁(0), y₂(0), y₁(π), y₂(π)) throughout. A
//! condition matrix `a` is 2×4 and imposes a·ŷ = 0 with a plain (unconjugated)
//! product. The determinant is kept in log form so eigenvalue searches stay
//! stable far from the real axis.

use crate::grid::Grid;
use crate::linalg::{nullspace_2x4, singular_values_2x4, svd_2x2};
use crate::logmag::{logsumexp, LogComplex};
use crate::potential::Potential;
use crate::solver::{solve_fundamental, FundamentalMatrix};
use crate::space::{GridFunction2, SpectralParameter};
use crate::{Complex, Error, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

/// Deepest edge bisection while tracking the determinant's argument.
const MAX_EDGE_DEPTH: usize = 40;
/// Longest accepted walk segment. The determinant's phase turns at a rate
/// set by the explicit e^{±iλπ} factors (at most about 2π per unit of λ), so
/// segments this short cannot alias a full turn into a small wrapped angle.
const MAX_EDGE_LEAF: f64 = 0.2;
/// A contour node this far (in log scale) below the walk's own median level
/// counts as "on top of a zero". Walk-local so that small cells around a
/// multiple zero, where the determinant is uniformly tiny, stay usable.
const NEAR_ZERO_DROP: f64 = 13.815510557964274;
/// Split-line positions tried when a zero sits on a subdivision line.
const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.53, 0.44, 0.58, 0.41];
/// Cells at most this fraction of the local scale switch to root polishing.
/// Polishing must take over well before subdivision pushes split lines into
/// the near-zero band of a multiple root.
const REFINE_DIAG_FACTOR: f64 = 0.06;
/// Cells this small give up polishing and report their center.
const MIN_DIAG_FACTOR: f64 = 1e-6;
/// Outer contour dilation per retry when it grazes a zero.
const DILATE_STEP: f64 = 0.01;
const MAX_CONTOUR_ATTEMPTS: usize = 5;
/// Largest acceptable σ₂/σ₁ of the boundary map at a claimed eigenvalue.
const RANK_GAP: f64 = 1e-3;

/// Two-point conditions U_i(y) = Σ_j a_ij ŷ_j = 0, validated to have rank 2.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    a: [[Complex; 4]; 2],
}

impl BoundaryConditions {
    pub fn new(a: [[Complex; 4]; 2]) -> Result<BoundaryConditions> {
        for row in &a {
            for z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Config {
                        field: "boundary".into(),
                        message: "condition matrix has a non-finite entry".into(),
                    });
                }
            }
        }
        let (s1, s2) = singular_values_2x4(&a);
        if s2 <= 1e-12 * s1.max(1e-300) {
            return Err(Error::RankDeficientBc { sigma_min: s2 });
        }
        Ok(BoundaryConditions { a })
    }

    pub fn matrix(&self) -> &[[Complex; 4]; 2] {
        &self.a
    }

    /// Residuals (U₁(y), U₂(y)) for a concrete function.
    pub fn apply(&self, y: &GridFunction2) -> [Complex; 2] {
        let (y10, y20) = y.at_zero();
        let (y1p, y2p) = y.at_pi();
        let bv = [y10, y20, y1p, y2p];
        let mut out = [Complex::new(0.0, 0.0); 2];
        for i in 0..2 {
            out[i] = (0..4).map(|j| self.a[i][j] * bv[j]).sum();
        }
        out
    }
}

/// Search region in the λ plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Rectangle> {
        let r = Rectangle {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
        };
        let bounds = [r.re_min, r.re_max, r.im_min, r.im_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config {
                field: "region".into(),
                message: "rectangle bounds must be finite".into(),
            });
        }
        if !(r.re_min < r.re_max) || !(r.im_min < r.im_max) {
            return Err(Error::Config {
                field: "region".into(),
                message: "rectangle bounds must satisfy min < max in both axes".into(),
            });
        }
        if bounds.iter().any(|b| b.abs() > 200.0) {
            return Err(Error::Config {
                field: "region".into(),
                message: "rectangle bounds are limited to |bound| ≤ 200".into(),
            });
        }
        Ok(r)
    }

    pub fn center(&self) -> Complex {
        Complex::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    fn diag(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn max_abs(&self) -> f64 {
        self.corners().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn corners(&self) -> [Complex; 4] {
        [
            Complex::new(self.re_min, self.im_min),
            Complex::new(self.re_max, self.im_min),
            Complex::new(self.re_max, self.im_max),
            Complex::new(self.re_min, self.im_max),
        ]
    }

    /// Counterclockwise boundary edges.
    fn edges(&self) -> [(Complex, Complex); 4] {
        let [a, b, c, d] = self.corners();
        [(a, b), (b, c), (c, d), (d, a)]
    }

    fn dilated(&self, f: f64) -> Rectangle {
        let cw = 0.5 * (self.re_max - self.re_min) * (1.0 + f);
        let ch = 0.5 * (self.im_max - self.im_min) * (1.0 + f);
        let c = self.center();
        Rectangle {
            re_min: c.re - cw,
            re_max: c.re + cw,
            im_min: c.im - ch,
            im_max: c.im + ch,
        }
    }

    fn split_at(&self, fr: f64) -> [Rectangle; 4] {
        let rs = self.re_min + fr * (self.re_max - self.re_min);
        let is = self.im_min + fr * (self.im_max - self.im_min);
        let cell = |re_min, re_max, im_min, im_max| Rectangle {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        [
            cell(self.re_min, rs, self.im_min, is),
            cell(rs, self.re_max, self.im_min, is),
            cell(self.re_min, rs, is, self.im_max),
            cell(rs, self.re_max, is, self.im_max),
        ]
    }

    fn contains(&self, z: Complex, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }
}

/// U_i(Y^{[k]}) for both conditions and both factored columns, in log form.
fn boundary_matrix(fm: &FundamentalMatrix, bc: &BoundaryConditions) -> [[LogComplex; 2]; 2] {
    let mut u = [[LogComplex::ZERO; 2]; 2];
    for k in 0..2 {
        let col = fm.dephased_column(k + 1);
        let (z1, z2) = col.at_zero();
        let (p1, p2) = col.at_pi();
        let phase = fm.phase_at(k + 1, PI);
        for i in 0..2 {
            let at_zero = bc.a[i][0] * z1 + bc.a[i][1] * z2;
            let at_pi = bc.a[i][2] * p1 + bc.a[i][3] * p2;
            u[i][k] = LogComplex::from_complex(at_zero)
                .add(LogComplex::from_complex(at_pi).mul(phase));
        }
    }
    u
}

/// Characteristic determinant Δ(λ) = det U_i(Y^{[k]}). Zeros are the
/// eigenvalues; the value is independent of which half-plane family of
/// columns is used because the two families differ by a unimodular-determinant
/// transition matrix.
pub fn characteristic_determinant(
    v: &Potential,
    bc: &BoundaryConditions,
    param: SpectralParameter,
    grid: &Arc<Grid>,
    tol: f64,
) -> Result<LogComplex> {
    let (fm, _) = solve_fundamental(v, param, grid, tol)?;
    let u = boundary_matrix(&fm, bc);
    Ok(u[0][0].mul(u[1][1]).sub(u[0][1].mul(u[1][0])))
}

/// Caching determinant evaluator over one fixed grid, keyed by λ bits.
struct DetEvaluator<'a> {
    v: &'a Potential,
    bc: &'a BoundaryConditions,
    grid: Arc<Grid>,
    tol: f64,
    cache: HashMap<(u64, u64), LogComplex>,
}

impl<'a> DetEvaluator<'a> {
    fn new(v: &'a Potential, bc: &'a BoundaryConditions, region: &Rectangle, tol: f64) -> Self {
        // one grid adequate for the worst corner serves the whole region
        let worst = region.max_abs();
        let grid = Arc::new(Grid::for_parameter(Complex::new(worst, 0.0)));
        DetEvaluator {
            v,
            bc,
            grid,
            tol,
            cache: HashMap::new(),
        }
    }

    fn eval(&mut self, lambda: Complex) -> Result<LogComplex> {
        let key = (lambda.re.to_bits(), lambda.im.to_bits());
        if let Some(d) = self.cache.get(&key) {
            return Ok(*d);
        }
        let param = SpectralParameter::auto(lambda);
        let det = characteristic_determinant(self.v, self.bc, param, &self.grid, self.tol)?;
        self.cache.insert(key, det);
        Ok(det)
    }
}

/// Argument change of Δ along the segment z0 → z1, bisecting until each piece
/// turns the phase by less than π/2. Returns (Σ arg increments, dirty) where
/// dirty flags a depth blowup or a node too close to a zero.
fn edge_arg_change(
    ev: &mut DetEvaluator,
    z0: Complex,
    z1: Complex,
    depth: usize,
    logs: &mut Vec<f64>,
) -> Result<(f64, bool)> {
    let f0 = ev.eval(z0)?;
    let f1 = ev.eval(z1)?;
    if f0.is_zero() || f1.is_zero() {
        return Ok((0.0, true));
    }
    logs.push(f0.log_abs);
    logs.push(f1.log_abs);
    let delta = f1.div(f0).arg();
    if delta.abs() <= FRAC_PI_2 && (z1 - z0).norm() <= MAX_EDGE_LEAF {
        return Ok((delta, false));
    }
    if depth >= MAX_EDGE_DEPTH {
        return Ok((delta, true));
    }
    let mid = 0.5 * (z0 + z1);
    let (a, d1) = edge_arg_change(ev, z0, mid, depth + 1, logs)?;
    let (b, d2) = edge_arg_change(ev, mid, z1, depth + 1, logs)?;
    Ok((a + b, d1 || d2))
}

/// Raw winding data for one rectangle: (total/2π, dirty, visited log levels).
fn contour_walk(ev: &mut DetEvaluator, rect: &Rectangle) -> Result<(f64, bool, Vec<f64>)> {
    let mut total = 0.0;
    let mut dirty = false;
    let mut logs = Vec::new();
    for (z0, z1) in rect.edges() {
        let (d, bad) = edge_arg_change(ev, z0, z1, 0, &mut logs)?;
        total += d;
        dirty = dirty || bad;
    }
    Ok((total / (2.0 * PI), dirty, logs))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len() / 2]
}

/// Winding count of a subdivision cell; `None` means the cell's contour is
/// unreliable (zero too close, or non-integer total) and the split should be
/// retried elsewhere.
fn cell_winding(ev: &mut DetEvaluator, rect: &Rectangle) -> Result<Option<usize>> {
    let (w, dirty, mut logs) = contour_walk(ev, rect)?;
    if dirty || logs.is_empty() {
        return Ok(None);
    }
    let local = median(&mut logs);
    if logs.iter().any(|&l| l < local - NEAR_ZERO_DROP) && rect.diag() > 1e-3 {
        return Ok(None);
    }
    let rounded = w.round();
    if (w - rounded).abs() > 0.2 || rounded < 0.0 {
        return Ok(None);
    }
    Ok(Some(rounded as usize))
}

/// Secant iteration for a simple zero, on the determinant rescaled by the
/// contour's reference level.
fn secant_polish(
    ev: &mut DetEvaluator,
    start: Complex,
    step: f64,
    ref_log: f64,
) -> Result<Option<Complex>> {
    let mut x0 = start;
    let mut x1 = start + Complex::new(0.37 * step, 0.21 * step);
    let mut f0 = rescaled(ev.eval(x0)?, ref_log);
    let mut f1 = rescaled(ev.eval(x1)?, ref_log);
    for _ in 0..80 {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            return Ok(None);
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        if !x2.re.is_finite() || !x2.im.is_finite() {
            return Ok(None);
        }
        if (x2 - x1).norm() <= 1e-13 * (1.0 + x2.norm()) {
            return Ok(Some(x2));
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = rescaled(ev.eval(x1)?, ref_log);
    }
    Ok(None)
}

/// Newton iteration λ ← λ − m·Δ/Δ′ for a zero of known multiplicity m, with
/// Δ′ from a central difference along the real direction. A zero of
/// multiplicity m computed from values with relative noise ε cannot be
/// located better than ~ε^{1/m}, so small stalled steps count as converged.
fn newton_polish(
    ev: &mut DetEvaluator,
    start: Complex,
    m: usize,
    ref_log: f64,
) -> Result<Option<Complex>> {
    let mut x = start;
    let mut prev_step = f64::INFINITY;
    for _ in 0..60 {
        let h = 1e-6 * (1.0 + x.norm());
        let f = rescaled(ev.eval(x)?, ref_log);
        let fp = (rescaled(ev.eval(x + h)?, ref_log) - rescaled(ev.eval(x - h)?, ref_log))
            / (2.0 * h);
        if fp.norm() == 0.0 {
            return Ok(None);
        }
        let step = (m as f64) * f / fp;
        x -= step;
        if !x.re.is_finite() || !x.im.is_finite() {
            return Ok(None);
        }
        let scale = 1.0 + x.norm();
        let stalled = step.norm() <= 1e-5 * scale && step.norm() > 0.4 * prev_step;
        if step.norm() <= 1e-11 * scale || stalled {
            return Ok(Some(x));
        }
        prev_step = step.norm();
    }
    Ok(None)
}

fn rescaled(det: LogComplex, ref_log: f64) -> Complex {
    if det.is_zero() {
        Complex::new(0.0, 0.0)
    } else {
        det.mantissa * (det.log_abs - ref_log).exp()
    }
}

fn subdivide(
    ev: &mut DetEvaluator,
    rect: &Rectangle,
    winding: usize,
    ref_log: f64,
    out: &mut Vec<(Complex, usize)>,
) -> Result<()> {
    let scale = 1.0 + rect.max_abs();
    if rect.diag() <= REFINE_DIAG_FACTOR * scale {
        let polished = if winding == 1 {
            secant_polish(ev, rect.center(), 0.25 * rect.diag(), ref_log)?
        } else {
            newton_polish(ev, rect.center(), winding, ref_log)?
        };
        if let Some(root) = polished.filter(|z| rect.contains(*z, rect.diag())) {
            out.push((root, winding));
            return Ok(());
        }
        if rect.diag() <= MIN_DIAG_FACTOR * scale {
            out.push((rect.center(), winding));
            return Ok(());
        }
    }
    'fractions: for &fr in &SPLIT_FRACTIONS {
        let children = rect.split_at(fr);
        let mut windings = [0usize; 4];
        for (slot, child) in windings.iter_mut().zip(&children) {
            match cell_winding(ev, child)? {
                Some(w) => *slot = w,
                None => continue 'fractions,
            }
        }
        if windings.iter().sum::<usize>() != winding {
            continue 'fractions;
        }
        for (child, w) in children.iter().zip(windings) {
            if w > 0 {
                subdivide(ev, child, w, ref_log, out)?;
            }
        }
        return Ok(());
    }
    Err(Error::ContourNearZero {
        attempts: SPLIT_FRACTIONS.len(),
    })
}

#[derive(Debug, Clone)]
pub struct SpectrumPoint {
    pub lambda: Complex,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub region: Rectangle,
    /// Zero count (with multiplicity) inside the searched contour.
    pub winding_total: usize,
    /// Sorted by (Re λ, Im λ).
    pub eigenvalues: Vec<SpectrumPoint>,
}

/// All eigenvalues in a rectangle, located by recursive winding counts and
/// polished to roughly 1e-11 relative accuracy. The outer contour is dilated
/// by 1% steps when it grazes a zero, so eigenvalues within about 1% of the
/// requested boundary may be included.
pub fn find_eigenvalues(
    v: &Potential,
    bc: &BoundaryConditions,
    region: Rectangle,
    tol: f64,
) -> Result<SpectrumReport> {
    let mut ev = DetEvaluator::new(v, bc, &region, tol);
    let mut attempt = 0usize;
    let (rect, ref_log, winding) = loop {
        let rect = region.dilated(DILATE_STEP * attempt as f64);
        let (w, depth_dirty, mut logs) = contour_walk(&mut ev, &rect)?;
        if logs.is_empty() {
            return Err(Error::ContourNearZero { attempts: attempt + 1 });
        }
        let c = median(&mut logs);
        let grazing = depth_dirty || logs.iter().any(|&l| l < c - NEAR_ZERO_DROP);
        let rounded = w.round();
        let unstable = (w - rounded).abs() > 0.2 || rounded < 0.0;
        if !grazing && !unstable {
            break (rect, c, rounded as usize);
        }
        attempt += 1;
        if attempt > MAX_CONTOUR_ATTEMPTS {
            return if grazing {
                Err(Error::ContourNearZero { attempts: attempt })
            } else {
                Err(Error::ContourUnstable { total: w })
            };
        }
    };

    let mut roots = Vec::new();
    if winding > 0 {
        subdivide(&mut ev, &rect, winding, ref_log, &mut roots)?;
    }
    roots.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .expect("finite eigenvalues")
    });
    // a multiple zero can come back as a cluster of nearby near-simple roots;
    // collapse such clusters into one point with the summed multiplicity
    let mut merged: Vec<(Complex, usize)> = Vec::with_capacity(roots.len());
    for (lambda, mult) in roots {
        match merged.last_mut() {
            Some((prev, pm)) if (lambda - *prev).norm() <= 1e-7 * (1.0 + lambda.norm()) => {
                let total = (*pm + mult) as f64;
                *prev = (*prev * (*pm as f64) + lambda * (mult as f64)) / total;
                *pm += mult;
            }
            _ => merged.push((lambda, mult)),
        }
    }
    Ok(SpectrumReport {
        region,
        winding_total: winding,
        eigenvalues: merged
            .into_iter()
            .map(|(lambda, multiplicity)| SpectrumPoint {
                lambda,
                multiplicity,
            })
            .collect(),
    })
}

/// Per-column scale of the boundary data, used to condition the 2×2 boundary
/// map before extracting its null vector.
fn column_boundary_scale(fm: &FundamentalMatrix, bc: &BoundaryConditions, k: usize) -> f64 {
    let col = fm.dephased_column(k + 1);
    let (z1, z2) = col.at_zero();
    let (p1, p2) = col.at_pi();
    let lp = fm.phase_at(k + 1, PI).log_abs;
    let log_bv = [
        z1.norm().ln(),
        z2.norm().ln(),
        p1.norm().ln() + lp,
        p2.norm().ln() + lp,
    ];
    let mut best = f64::NEG_INFINITY;
    for i in 0..2 {
        let terms: Vec<f64> = (0..4)
            .filter_map(|j| {
                let an = bc.a[i][j].norm();
                (an > 0.0 && log_bv[j] > f64::NEG_INFINITY).then(|| an.ln() + log_bv[j])
            })
            .collect();
        if !terms.is_empty() {
            best = best.max(logsumexp(&terms));
        }
    }
    best
}

/// Normalized eigenfunction at an eigenvalue: the null combination of the two
/// factored columns under the boundary map, materialized on the grid, with
/// ‖y‖ = 1 and the largest sample rotated to the positive real axis.
pub fn eigenfunction(
    v: &Potential,
    bc: &BoundaryConditions,
    lambda: Complex,
    tol: f64,
) -> Result<GridFunction2> {
    let grid = Arc::new(Grid::for_parameter(lambda));
    eigenfunction_on(v, bc, lambda, &grid, tol)
}

/// `eigenfunction` on a caller-supplied grid, so eigenfunctions at different
/// λ can share one discretization (inner products require matching grids).
pub fn eigenfunction_on(
    v: &Potential,
    bc: &BoundaryConditions,
    lambda: Complex,
    grid: &Arc<Grid>,
    tol: f64,
) -> Result<GridFunction2> {
    let param = SpectralParameter::auto(lambda);
    let (fm, _) = solve_fundamental(v, param, grid, tol)?;
    let u = boundary_matrix(&fm, bc);
    let scales = [
        column_boundary_scale(&fm, bc, 0),
        column_boundary_scale(&fm, bc, 1),
    ];
    let mut conditioned = [[Complex::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        if scales[k] == f64::NEG_INFINITY {
            continue;
        }
        for i in 0..2 {
            let e = u[i][k];
            if !e.is_zero() {
                conditioned[i][k] = e.mantissa * (e.log_abs - scales[k]).exp();
            }
        }
    }
    let (s1, s2, null) = svd_2x2(&conditioned);
    if s1 < 1e-6 {
        return Err(Error::DegenerateEigenvalue {
            lambda,
            multiplicity: 2,
        });
    }
    if s2 > RANK_GAP * s1 {
        return Err(Error::NotAnEigenvalue {
            lambda,
            ratio: s2 / s1,
        });
    }
    // undo the per-column conditioning, damping with a common factor so the
    // larger-scale column never overflows
    let base = scales[0].min(scales[1]);
    let undo = |k: usize| {
        if scales[k] == f64::NEG_INFINITY {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new((base - scales[k]).exp(), 0.0)
        }
    };
    let c1 = null[0] * undo(0);
    let c2 = null[1] * undo(1);
    let y = fm.column(1).scale(c1).add_scaled(c2, &fm.column(2))?;
    let norm = y.h_norm();
    if norm.is_zero() {
        return Err(Error::DegenerateEigenvalue {
            lambda,
            multiplicity: 2,
        });
    }
    let mut y = y.scale(Complex::new((-norm.log_value).exp(), 0.0));
    // canonical phase: rotate the largest sample to the positive real axis
    let mut top = Complex::new(0.0, 0.0);
    for i in 0..y.len() {
        let (a, b) = y.at(i);
        for z in [a, b] {
            if z.norm() > top.norm() {
                top = z;
            }
        }
    }
    if top.norm() > 0.0 {
        y = y.scale(top.conj() / top.norm());
    }
    Ok(y)
}

/// Lagrange boundary term [−i y₁ z̄₁ + i y₂ z̄₂]₀^π; it vanishes whenever y
/// satisfies the conditions and z the adjoint conditions.
pub fn boundary_bilinear(y: &GridFunction2, z: &GridFunction2) -> Complex {
    let i = Complex::new(0.0, 1.0);
    let (y10, y20) = y.at_zero();
    let (y1p, y2p) = y.at_pi();
    let (z10, z20) = z.at_zero();
    let (z1p, z2p) = z.at_pi();
    (-i * y1p * z1p.conj() + i * y2p * z2p.conj())
        - (-i * y10 * z10.conj() + i * y20 * z20.conj())
}

/// The diagonal weights of the boundary bilinear form on the vector
/// (y₁(0), y₂(0), y₁(π), y₂(π)).
fn bilinear_weights() -> [Complex; 4] {
    let i = Complex::new(0.0, 1.0);
    [i, -i, -i, i]
}

/// Boundary conditions adjoint to `bc`: the unique rank-2 set whose kernel is
/// the bilinear-orthogonal complement of the kernel of `bc`.
pub fn adjoint_conditions(bc: &BoundaryConditions) -> Result<BoundaryConditions> {
    let rank_err = || Error::RankDeficientBc { sigma_min: 0.0 };
    let kernel = nullspace_2x4(&bc.a).ok_or_else(rank_err)?;
    let s = bilinear_weights();
    // rows v_iᵀ·S: plain-kernel vectors m satisfy v_iᵀ S m = 0
    let mut vs = [[Complex::new(0.0, 0.0); 4]; 2];
    for i in 0..2 {
        for j in 0..4 {
            vs[i][j] = kernel[i][j] * s[j];
        }
    }
    let m = nullspace_2x4(&vs).ok_or_else(rank_err)?;
    // adjoint kernel is span(conj m); rows of the adjoint matrix must be
    // plain-orthogonal to it
    let p = nullspace_2x4(&m).ok_or_else(rank_err)?;
    let a_star = [p[0].map(|z| z.conj()), p[1].map(|z| z.conj())];
    BoundaryConditions::new(a_star)
}

/// Eigenfunction of the direct problem paired with the adjoint eigenfunction
/// at the conjugate eigenvalue, scaled so that ⟨y, z⟩ = 1.
#[derive(Debug, Clone)]
pub struct BiorthogonalPair {
    pub lambda: Complex,
    pub y: GridFunction2,
    pub z: GridFunction2,
    /// ⟨y, z_unit⟩ before rescaling; both factors have unit norm, so the
    /// magnitude is the pairing cosine and 1/|·| is the projector norm.
    pub raw_pairing: Complex,
}

pub fn biorthogonal_pair(
    v: &Potential,
    bc: &BoundaryConditions,
    lambda: Complex,
    tol: f64,
) -> Result<BiorthogonalPair> {
    let grid = Arc::new(Grid::for_parameter(lambda));
    biorthogonal_pair_on(v, bc, lambda, &grid, tol)
}

/// `biorthogonal_pair` on a caller-supplied grid; use one grid for a whole
/// spectrum so the resulting pairs can be combined and compared.
pub fn biorthogonal_pair_on(
    v: &Potential,
    bc: &BoundaryConditions,
    lambda: Complex,
    grid: &Arc<Grid>,
    tol: f64,
) -> Result<BiorthogonalPair> {
    let y = eigenfunction_on(v, bc, lambda, grid, tol)?;
    let adj_bc = adjoint_conditions(bc)?;
    let adj_v = v.adjoint();
    let z_unit = eigenfunction_on(&adj_v, &adj_bc, lambda.conj(), grid, tol)?;
    let p = y.inner_product(&z_unit)?;
    if p.norm() < 1e-10 {
        return Err(Error::NearDegeneratePairing { ratio: p.norm() });
    }
    let z = z_unit.scale((Complex::new(1.0, 0.0) / p).conj());
    Ok(BiorthogonalPair {
        lambda,
        y,
        z,
        raw_pairing: p,
    })
}
