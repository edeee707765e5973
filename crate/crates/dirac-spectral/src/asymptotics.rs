//! Large-|Im λ| diagnostics for fundamental matrix columns: entry and column
//! norms, cross inner products between the direct and adjoint columns, decay
//! trends along vertical ladders σ + iτ_k, and the normalized-pairing sweep
//! r(τ) = |⟨y,z⟩| / (‖y‖‖z‖).
//!
//! Conventions for the trend checks, with E±(λ) = |(e^{±2iλπ} − 1)/(2λ)|:
//! the raw cross products satisfy |⟨Y¹,Z²⟩| = o(1)·E₊ and |⟨Y²,Z¹⟩| =
//! o(1)·E₋, so the measured prefactors |G₁₂|/E₊ and |G₂₁|/E₋ must not grow
//! along a ladder. Diagonal health is measured by the de-phased alignment
//! |⟨u₁,v₁⟩|/(‖u₁‖‖v₁‖), which Cauchy–Schwarz caps at 1 and which stays near 1
//! because the de-phased columns converge to (1,0) and (0,1).

use crate::grid::Grid;
use crate::logmag::{logsumexp, scaled_complex_sum, LogComplex, LogMagnitude};
use crate::potential::Potential;
use crate::solver::{solve_adjoint, solve_fundamental, FundamentalMatrix, SystemKind};
use crate::space::{exp_l2_norm, PhaseSign, SpectralParameter};
use crate::{Complex, Error, Result, LAMBDA_FLOOR};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Relative growth between consecutive ladder steps tolerated by the
/// monotone-trend checks.
pub const TREND_SLACK: f64 = 1.2;

#[derive(Debug, Clone, Copy)]
pub struct ColumnNorms {
    /// L₂ norms of the four factored entries, indexed [row][column].
    pub entry: [[LogMagnitude; 2]; 2],
    /// Norms of the two columns in L₂ ⊕ L₂.
    pub column: [LogMagnitude; 2],
}

/// Weighted log-domain L₂ norm of a de-phased entry u(x)·e^{px}.
fn entry_log_norm(grid: &Grid, u: &[Complex], p: Complex) -> LogMagnitude {
    let terms: Vec<f64> = grid
        .weights()
        .iter()
        .zip(grid.nodes())
        .zip(u)
        .map(|((&w, &x), v)| {
            let vn = v.norm();
            if vn == 0.0 {
                f64::NEG_INFINITY
            } else {
                w.ln() + 2.0 * vn.ln() + 2.0 * p.re * x
            }
        })
        .collect();
    let log_sq = logsumexp(&terms);
    if log_sq == f64::NEG_INFINITY {
        LogMagnitude::ZERO
    } else {
        LogMagnitude::from_log(0.5 * log_sq)
    }
}

pub fn column_norms(fm: &FundamentalMatrix) -> ColumnNorms {
    let grid = fm.grid();
    let mut entry = [[LogMagnitude::ZERO; 2]; 2];
    let mut column = [LogMagnitude::ZERO; 2];
    for k in 1..=2 {
        let p = fm.phase_exponent(k);
        let col = fm.dephased_column(k);
        let e1 = entry_log_norm(grid, &col.component1, p);
        let e2 = entry_log_norm(grid, &col.component2, p);
        entry[0][k - 1] = e1;
        entry[1][k - 1] = e2;
        let log_sq = logsumexp(&[2.0 * e1.log_value, 2.0 * e2.log_value]);
        column[k - 1] = if log_sq == f64::NEG_INFINITY {
            LogMagnitude::ZERO
        } else {
            LogMagnitude::from_log(0.5 * log_sq)
        };
    }
    ColumnNorms { entry, column }
}

#[derive(Debug, Clone)]
pub struct CrossProducts {
    /// G[j][k] = ⟨Y^{[j+1]}, Z^{[k+1]}⟩ in L₂ ⊕ L₂.
    pub g: [[LogComplex; 2]; 2],
    /// |G| divided by the column norm product; ≤ 1 by Cauchy–Schwarz.
    pub g_hat: [[f64; 2]; 2],
    /// De-phased diagonal alignment |⟨u_k, v_k⟩|/(‖u_k‖‖v_k‖).
    pub diag_alignment: [f64; 2],
}

/// Inner products between the columns of a direct solve and the columns of
/// the matching adjoint solve at the same original parameter.
pub fn cross_inner_products(
    direct: &FundamentalMatrix,
    adjoint: &FundamentalMatrix,
) -> Result<CrossProducts> {
    if direct.system != SystemKind::Direct || adjoint.system != SystemKind::Adjoint {
        return Err(Error::PairingMismatch(
            "cross products need one direct and one adjoint factorization, in that order".into(),
        ));
    }
    if direct.parameter.lambda != adjoint.parameter.lambda {
        return Err(Error::PairingMismatch(format!(
            "parameters differ: {} vs {}",
            direct.parameter.lambda, adjoint.parameter.lambda
        )));
    }
    if !direct.grid().compatible(adjoint.grid()) {
        return Err(Error::DistinctGrids);
    }
    let grid = direct.grid().clone();
    let dn = column_norms(direct);
    let an = column_norms(adjoint);

    let mut g = [[LogComplex::ZERO; 2]; 2];
    let mut g_hat = [[0.0f64; 2]; 2];
    let mut diag_alignment = [0.0f64; 2];
    for j in 1..=2 {
        let u = direct.dephased_column(j);
        let pj = direct.phase_exponent(j);
        for k in 1..=2 {
            let v = adjoint.dephased_column(k);
            let qk = adjoint.phase_exponent(k);
            let e = pj + qk.conj();
            let terms: Vec<(Complex, f64)> = grid
                .weights()
                .iter()
                .zip(grid.nodes())
                .enumerate()
                .map(|(i, (&w, &x))| {
                    let bracket = u.component1[i] * v.component1[i].conj()
                        + u.component2[i] * v.component2[i].conj();
                    let bn = bracket.norm();
                    if bn == 0.0 {
                        (Complex::new(1.0, 0.0), f64::NEG_INFINITY)
                    } else {
                        let dir = (bracket / bn) * Complex::from_polar(1.0, e.im * x);
                        (dir, w.ln() + bn.ln() + e.re * x)
                    }
                })
                .collect();
            let gjk = scaled_complex_sum(&terms);
            g[j - 1][k - 1] = gjk;
            let denom = dn.column[j - 1].mul(an.column[k - 1]);
            g_hat[j - 1][k - 1] = gjk.abs().div(denom).to_linear();
        }
        let v = adjoint.dephased_column(j);
        let plain = u.inner_product(&v)?;
        let denom = u.h_norm().mul(v.h_norm()).to_linear();
        diag_alignment[j - 1] = if denom == 0.0 { 0.0 } else { plain.norm() / denom };
    }
    Ok(CrossProducts {
        g,
        g_hat,
        diag_alignment,
    })
}

/// |(e^{±2iλπ} − 1)/(2λ)|: the exact size of ∫₀^π e^{±2iλx} dx, used as the
/// reference envelope for the off-diagonal cross products.
pub fn off_diagonal_envelope(lambda: Complex, sign: PhaseSign) -> LogMagnitude {
    let i2 = Complex::new(0.0, 2.0);
    let exponent = match sign {
        PhaseSign::Plus => i2 * lambda * PI,
        PhaseSign::Minus => -i2 * lambda * PI,
    };
    let one = LogComplex::from_complex(Complex::new(1.0, 0.0));
    let numerator = LogComplex::exp_of(exponent).sub(one);
    numerator
        .abs()
        .div(LogMagnitude::from_linear(2.0 * lambda.norm()))
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderRow {
    pub tau: f64,
    pub re_lambda: f64,
    pub im_lambda: f64,
    /// log ℍ norms of the direct columns.
    pub log_col1: f64,
    pub log_col2: f64,
    /// (√τ+1)·‖Y^{[1]}‖ and (√τ+1)e^{−πτ}·‖Y^{[2]}‖; both stay O(1).
    pub shaped_col1: f64,
    pub shaped_col2: f64,
    pub log_g11: f64,
    pub log_g12: f64,
    pub log_g21: f64,
    pub log_g22: f64,
    pub ghat11: f64,
    pub ghat12: f64,
    pub ghat21: f64,
    pub ghat22: f64,
    pub align1: f64,
    pub align2: f64,
    /// |G₁₂|/E₊ and |G₂₁|/E₋: the o(1) factors against the exact envelopes.
    pub prefactor12: f64,
    pub prefactor21: f64,
    /// (τ+1)·Ĝ₁₂ and (τ+1)e^{−2πτ}·|G₂₁|, reported for reference.
    pub literal12: f64,
    pub literal21: f64,
}

fn validate_ladder(sigma: f64, taus: &[f64]) -> Result<()> {
    if taus.len() < 2 {
        return Err(Error::InvalidSweep(format!(
            "a ladder needs at least 2 rungs, got {}",
            taus.len()
        )));
    }
    for pair in taus.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidSweep(format!(
                "τ values must be strictly increasing, found {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    for &tau in taus {
        if !(tau > 0.0) {
            return Err(Error::InvalidSweep(format!(
                "ladder rungs must have τ > 0, got {tau}"
            )));
        }
        if sigma.hypot(tau) < LAMBDA_FLOOR {
            return Err(Error::InvalidSweep(format!(
                "|λ| = {} is below the asymptotic floor {LAMBDA_FLOOR}",
                sigma.hypot(tau)
            )));
        }
    }
    Ok(())
}

/// Direct + adjoint solves and cross diagnostics at λ = σ + iτ for every τ in
/// the ladder.
pub fn asymptotics_ladder(
    v: &Potential,
    sigma: f64,
    taus: &[f64],
    tol: f64,
) -> Result<Vec<LadderRow>> {
    validate_ladder(sigma, taus)?;
    taus.par_iter()
        .map(|&tau| {
            let lambda = Complex::new(sigma, tau);
            let param = SpectralParameter::auto(lambda);
            let grid = Arc::new(Grid::for_parameter(lambda));
            let (direct, _) = solve_fundamental(v, param, &grid, tol)?;
            let (adjoint, _) = solve_adjoint(v, param, &grid, tol)?;
            let norms = column_norms(&direct);
            let cross = cross_inner_products(&direct, &adjoint)?;

            let shape = (tau.sqrt() + 1.0).ln();
            let shaped_col1 = (norms.column[0].log_value + shape).exp();
            let shaped_col2 = (norms.column[1].log_value + shape - PI * tau).exp();
            let e_plus = off_diagonal_envelope(lambda, PhaseSign::Plus);
            let e_minus = off_diagonal_envelope(lambda, PhaseSign::Minus);
            let g = &cross.g;
            Ok(LadderRow {
                tau,
                re_lambda: lambda.re,
                im_lambda: lambda.im,
                log_col1: norms.column[0].log_value,
                log_col2: norms.column[1].log_value,
                shaped_col1,
                shaped_col2,
                log_g11: g[0][0].log_abs,
                log_g12: g[0][1].log_abs,
                log_g21: g[1][0].log_abs,
                log_g22: g[1][1].log_abs,
                ghat11: cross.g_hat[0][0],
                ghat12: cross.g_hat[0][1],
                ghat21: cross.g_hat[1][0],
                ghat22: cross.g_hat[1][1],
                align1: cross.diag_alignment[0],
                align2: cross.diag_alignment[1],
                prefactor12: g[0][1].abs().div(e_plus).to_linear(),
                prefactor21: g[1][0].abs().div(e_minus).to_linear(),
                literal12: (tau + 1.0) * cross.g_hat[0][1],
                literal21: ((tau + 1.0).ln() - 2.0 * PI * tau + g[1][0].log_abs).exp(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderVerdict {
    /// min/max of shaped column quantities relative to the first rung.
    pub col1_band: (f64, f64),
    pub col2_band: (f64, f64),
    pub off_upper_monotone: bool,
    pub off_lower_monotone: bool,
    pub diag_in_window: bool,
    pub violations: Vec<String>,
}

impl LadderVerdict {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Trend assertions over a computed ladder: shaped column norms inside a
/// factor-4 band around the first rung, measured off-diagonal prefactors
/// non-increasing up to `TREND_SLACK`, de-phased diagonal alignment inside
/// [0.05, 1].
pub fn check_ladder(rows: &[LadderRow]) -> LadderVerdict {
    let mut violations = Vec::new();
    let band = |values: &mut dyn Iterator<Item = f64>| -> (f64, f64) {
        values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
    };
    let rel1 = rows[0].shaped_col1;
    let rel2 = rows[0].shaped_col2;
    let col1_band = band(&mut rows.iter().map(|r| r.shaped_col1 / rel1));
    let col2_band = band(&mut rows.iter().map(|r| r.shaped_col2 / rel2));
    for (name, b) in [("column 1", col1_band), ("column 2", col2_band)] {
        if b.0 < 0.25 || b.1 > 4.0 {
            violations.push(format!(
                "shaped {name} norm leaves the factor-4 band: [{:.4}, {:.4}]",
                b.0, b.1
            ));
        }
    }

    let mut off_upper_monotone = true;
    let mut off_lower_monotone = true;
    for pair in rows.windows(2) {
        if pair[1].prefactor12 > TREND_SLACK * pair[0].prefactor12 {
            off_upper_monotone = false;
            violations.push(format!(
                "|G12|/E+ grows between τ = {} and τ = {}: {:.3e} → {:.3e}",
                pair[0].tau, pair[1].tau, pair[0].prefactor12, pair[1].prefactor12
            ));
        }
        if pair[1].prefactor21 > TREND_SLACK * pair[0].prefactor21 {
            off_lower_monotone = false;
            violations.push(format!(
                "|G21|/E- grows between τ = {} and τ = {}: {:.3e} → {:.3e}",
                pair[0].tau, pair[1].tau, pair[0].prefactor21, pair[1].prefactor21
            ));
        }
    }

    let mut diag_in_window = true;
    for r in rows {
        for (which, a) in [(1, r.align1), (2, r.align2)] {
            if !(0.05..=1.0 + 1e-9).contains(&a) {
                diag_in_window = false;
                violations.push(format!(
                    "diagonal alignment {which} at τ = {} is {a:.4}, outside [0.05, 1]",
                    r.tau
                ));
            }
        }
    }

    LadderVerdict {
        col1_band,
        col2_band,
        off_upper_monotone,
        off_lower_monotone,
        diag_in_window,
        violations,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub quantity: String,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Extremes of (√τ+1)·‖e^{iλt}‖ and (√τ+1)e^{−πτ}·‖e^{−iλt}‖ over a τ scan.
/// Both quantities are pinched between positive constants.
pub fn exp_norm_sandwich(taus: &[f64]) -> (SandwichReport, SandwichReport) {
    let mut plus = (f64::INFINITY, f64::NEG_INFINITY);
    let mut minus = (f64::INFINITY, f64::NEG_INFINITY);
    for &tau in taus {
        let param = SpectralParameter::auto(Complex::new(0.0, tau));
        let shape = (tau.abs().sqrt() + 1.0).ln();
        let p = (exp_l2_norm(&param, PhaseSign::Plus).log_value + shape).exp();
        let m = (exp_l2_norm(&param, PhaseSign::Minus).log_value + shape - PI * tau).exp();
        plus = (plus.0.min(p), plus.1.max(p));
        minus = (minus.0.min(m), minus.1.max(m));
    }
    (
        SandwichReport {
            quantity: "exp_norm_plus_shaped".into(),
            lower: plus.0,
            upper: plus.1,
            count: taus.len(),
        },
        SandwichReport {
            quantity: "exp_norm_minus_shaped".into(),
            lower: minus.0,
            upper: minus.1,
            count: taus.len(),
        },
    )
}

/// Complex coefficient pairs drawn uniformly from the unit sphere of ℂ², by
/// normalizing four Box–Muller gaussians. Deterministic in the seed.
pub fn sample_unit_sphere_coefficients(count: usize, seed: u64) -> Vec<(Complex, Complex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal_pair = move |rng: &mut ChaCha8Rng| {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        (r * angle.cos(), r * angle.sin())
    };
    (0..count)
        .map(|_| {
            let (g1, g2) = normal_pair(&mut rng);
            let (g3, g4) = normal_pair(&mut rng);
            let norm = (g1 * g1 + g2 * g2 + g3 * g3 + g4 * g4).sqrt().max(1e-300);
            (
                Complex::new(g1 / norm, g2 / norm),
                Complex::new(g3 / norm, g4 / norm),
            )
        })
        .collect()
}

/// log ℍ norm of c₁·col1·e^{p₁x} + c₂·col2·e^{p₂x}, assembled node by node so
/// no intermediate leaves the representable range.
fn log_combination_norm(fm: &FundamentalMatrix, c1: Complex, c2: Complex) -> LogMagnitude {
    let grid = fm.grid();
    let u = fm.dephased_column(1);
    let v = fm.dephased_column(2);
    let p1 = fm.phase_exponent(1);
    let p2 = fm.phase_exponent(2);
    let mut terms = Vec::with_capacity(2 * grid.len());
    for (i, (&w, &x)) in grid.weights().iter().zip(grid.nodes()).enumerate() {
        for (a, b) in [
            (c1 * u.component1[i], c2 * v.component1[i]),
            (c1 * u.component2[i], c2 * v.component2[i]),
        ] {
            let ta = if a.norm() == 0.0 {
                f64::NEG_INFINITY
            } else {
                a.norm().ln() + p1.re * x
            };
            let tb = if b.norm() == 0.0 {
                f64::NEG_INFINITY
            } else {
                b.norm().ln() + p2.re * x
            };
            let top = ta.max(tb);
            if top == f64::NEG_INFINITY {
                continue;
            }
            let da = Complex::from_polar(1.0, a.arg() + p1.im * x);
            let db = Complex::from_polar(1.0, b.arg() + p2.im * x);
            let resid = da * (ta - top).exp() + db * (tb - top).exp();
            let r = resid.norm();
            if r > 0.0 {
                terms.push(w.ln() + 2.0 * (top + r.ln()));
            }
        }
    }
    let log_sq = logsumexp(&terms);
    if log_sq == f64::NEG_INFINITY {
        LogMagnitude::ZERO
    } else {
        LogMagnitude::from_log(0.5 * log_sq)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundAudit {
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub samples: usize,
    /// Extremes of ‖C₁Y¹ + C₂Y²‖ / (|C₁|‖Y¹‖ + |C₂|‖Y²‖) over the samples.
    pub worst_ratio: f64,
    pub best_ratio: f64,
}

/// Samples random unit coefficient pairs and measures how far the norm of the
/// combination can drop below the triangle-inequality scale.
pub fn lower_bound_audit(
    v: &Potential,
    lambda: Complex,
    count: usize,
    seed: u64,
    tol: f64,
) -> Result<LowerBoundAudit> {
    if count == 0 {
        return Err(Error::InvalidSweep("audit needs at least one sample".into()));
    }
    let param = SpectralParameter::auto(lambda);
    let grid = Arc::new(Grid::for_parameter(lambda));
    let (fm, _) = solve_fundamental(v, param, &grid, tol)?;
    let norms = column_norms(&fm);
    let mut worst = f64::INFINITY;
    let mut best = f64::NEG_INFINITY;
    for (c1, c2) in sample_unit_sphere_coefficients(count, seed) {
        let numer = log_combination_norm(&fm, c1, c2);
        let denom = LogMagnitude::from_linear(c1.norm())
            .mul(norms.column[0])
            .add(LogMagnitude::from_linear(c2.norm()).mul(norms.column[1]));
        let ratio = numer.div(denom).to_linear();
        worst = worst.min(ratio);
        best = best.max(ratio);
    }
    Ok(LowerBoundAudit {
        re_lambda: lambda.re,
        im_lambda: lambda.im,
        samples: count,
        worst_ratio: worst,
        best_ratio: best,
    })
}

/// Coefficients of y = C₁Y^{[1]} + C₂Y^{[2]} and z = C̃₁Z^{[1]} + C̃₂Z^{[2]}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinationCoefficients {
    pub c1: Complex,
    pub c2: Complex,
    pub c1_adj: Complex,
    pub c2_adj: Complex,
}

impl Default for CombinationCoefficients {
    fn default() -> Self {
        let one = Complex::new(1.0, 0.0);
        CombinationCoefficients {
            c1: one,
            c2: one,
            c1_adj: one,
            c2_adj: one,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub log_norm_y: f64,
    pub log_norm_z: f64,
    pub log_inner: f64,
    /// |⟨y,z⟩| / (‖y‖‖z‖); at most 1 by Cauchy–Schwarz.
    pub ratio: f64,
    /// log(‖y‖‖z‖) after rescaling to ⟨y,z⟩ = 1; present when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_norm_product: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// (τ, reason) for rungs whose pairing vanished.
    pub skipped: Vec<(f64, String)>,
}

/// Pairing decay scan along a vertical ladder: solves the direct and adjoint
/// systems at each λ = σ + iτ_k, combines the columns with the given
/// coefficients, and reports norms and the normalized pairing per rung.
pub fn lemma1_sweep(
    v: &Potential,
    sigma: f64,
    taus: &[f64],
    coeffs: &CombinationCoefficients,
    normalize: bool,
    tol: f64,
) -> Result<SweepOutcome> {
    validate_ladder(sigma, taus)?;
    let per_rung: Vec<(f64, std::result::Result<SweepRow, String>)> = taus
        .par_iter()
        .map(|&tau| {
            let lambda = Complex::new(sigma, tau);
            let param = SpectralParameter::auto(lambda);
            let grid = Arc::new(Grid::for_parameter(lambda));
            let run = || -> Result<SweepRow> {
                let (direct, _) = solve_fundamental(v, param, &grid, tol)?;
                let (adjoint, _) = solve_adjoint(v, param, &grid, tol)?;
                let cross = cross_inner_products(&direct, &adjoint)?;
                let log_norm_y = log_combination_norm(&direct, coeffs.c1, coeffs.c2).log_value;
                let log_norm_z =
                    log_combination_norm(&adjoint, coeffs.c1_adj, coeffs.c2_adj).log_value;
                let cs = [coeffs.c1, coeffs.c2];
                let cs_adj = [coeffs.c1_adj, coeffs.c2_adj];
                let mut terms = Vec::with_capacity(4);
                for j in 0..2 {
                    for k in 0..2 {
                        let factor = cs[j] * cs_adj[k].conj();
                        let gjk = cross.g[j][k];
                        if factor.norm() > 0.0 && !gjk.is_zero() {
                            terms.push((
                                gjk.mantissa * (factor / factor.norm()),
                                gjk.log_abs + factor.norm().ln(),
                            ));
                        }
                    }
                }
                let inner = scaled_complex_sum(&terms);
                if inner.is_zero() {
                    return Err(Error::PairingMismatch(format!(
                        "⟨y,z⟩ vanished at τ = {tau}"
                    )));
                }
                let log_inner = inner.log_abs;
                let ratio = (log_inner - log_norm_y - log_norm_z).exp();
                let log_norm_product = normalize.then(|| log_norm_y + log_norm_z - log_inner);
                Ok(SweepRow {
                    tau,
                    log_norm_y,
                    log_norm_z,
                    log_inner,
                    ratio,
                    log_norm_product,
                })
            };
            match run() {
                Ok(row) => (tau, Ok(row)),
                Err(Error::PairingMismatch(reason)) => (tau, Err(reason)),
                Err(other) => (tau, Err(format!("rung failed: {other}"))),
            }
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut hard_failure = None;
    for (tau, item) in per_rung {
        match item {
            Ok(row) => rows.push(row),
            Err(reason) => {
                if reason.starts_with("rung failed") && hard_failure.is_none() {
                    hard_failure = Some(Error::InvalidSweep(format!("τ = {tau}: {reason}")));
                }
                skipped.push((tau, reason));
            }
        }
    }
    if let Some(err) = hard_failure {
        return Err(err);
    }
    Ok(SweepOutcome { rows, skipped })
}
