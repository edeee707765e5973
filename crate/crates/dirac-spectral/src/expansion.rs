//! Rank-one spectral projectors 𝔓_n f = ⟨f, z_n⟩·y_n built from biorthogonal
//! pairs, partial expansion sums, and a growth witness for the projector
//! norms ‖𝔓_n‖ = ‖y_n‖·‖z_n‖. A sequence of projector norms that keeps
//! climbing rules out norm convergence of the expansion for general data.

use crate::bvp::BiorthogonalPair;
use crate::logmag::LogMagnitude;
use crate::space::GridFunction2;
use crate::{Complex, Error, Result};
use serde::Serialize;
use std::fmt;

/// ⟨y, z⟩ may drift from 1 by this much before a pair is rejected.
const NORMALIZATION_TOL: f64 = 1e-6;

fn check_normalized(pair: &BiorthogonalPair) -> Result<()> {
    let inner = pair.y.inner_product(&pair.z)?;
    if (inner - Complex::new(1.0, 0.0)).norm() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            lambda: pair.lambda,
        });
    }
    Ok(())
}

/// 𝔓 f = ⟨f, z⟩ · y.
pub fn apply_projector(pair: &BiorthogonalPair, f: &GridFunction2) -> Result<GridFunction2> {
    check_normalized(pair)?;
    let coefficient = f.inner_product(&pair.z)?;
    Ok(pair.y.scale(coefficient))
}

#[derive(Debug, Clone)]
pub struct ProjectorNorm {
    /// ‖y‖·‖z‖: the exact operator norm of the rank-one projector.
    pub exact: LogMagnitude,
    /// (‖y₁‖+‖y₂‖)(‖z₁‖+‖z₂‖)/(2√2); squeezed between exact/(2√2) and
    /// exact/√2, so it certifies growth whenever the exact norm grows.
    pub component_bound: LogMagnitude,
    /// ‖y‖·‖z_m‖ for each component m of z with nonzero mass: the norm of 𝔓
    /// restricted to probe data supported on that component alone.
    pub probe_values: Vec<LogMagnitude>,
}

pub fn projector_norm(pair: &BiorthogonalPair) -> Result<ProjectorNorm> {
    check_normalized(pair)?;
    let ny = pair.y.h_norm();
    let nz = pair.z.h_norm();
    let y_split = pair.y.component_norm(1).add(pair.y.component_norm(2));
    let z_split = pair.z.component_norm(1).add(pair.z.component_norm(2));
    let component_bound = y_split
        .mul(z_split)
        .div(LogMagnitude::from_linear(2.0 * 2.0f64.sqrt()));
    let probe_values = (1..=2)
        .filter_map(|m| {
            let nm = pair.z.component_norm(m);
            (!nm.is_zero()).then(|| ny.mul(nm))
        })
        .collect();
    Ok(ProjectorNorm {
        exact: ny.mul(nz),
        component_bound,
        probe_values,
    })
}

/// Indices of `pairs` in expansion order: by |Re λ|, then Im λ, then Re λ.
pub fn expansion_order(pairs: &[BiorthogonalPair]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| {
        let ka = (pairs[a].lambda.re.abs(), pairs[a].lambda.im, pairs[a].lambda.re);
        let kb = (pairs[b].lambda.re.abs(), pairs[b].lambda.im, pairs[b].lambda.re);
        ka.partial_cmp(&kb).expect("finite eigenvalues")
    });
    order
}

/// Σ over the first `count` projectors (in expansion order) applied to f.
pub fn partial_sum(
    pairs: &[BiorthogonalPair],
    f: &GridFunction2,
    count: usize,
) -> Result<GridFunction2> {
    for pair in pairs {
        check_normalized(pair)?;
    }
    let order = expansion_order(pairs);
    let mut acc = GridFunction2::zeros(f.grid().clone());
    for &idx in order.iter().take(count) {
        let term = apply_projector(&pairs[idx], f)?;
        acc = acc.add_scaled(Complex::new(1.0, 0.0), &term)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceVerdict {
    /// Running maximum of log ‖𝔓_n‖ grew by at least ln 10 from the midpoint
    /// of the sequence to its end.
    UnboundedTrend,
    Bounded,
    /// Fewer than 3 usable records.
    Inconclusive,
}

impl fmt::Display for DivergenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DivergenceVerdict::UnboundedTrend => "unbounded-trend",
            DivergenceVerdict::Bounded => "bounded",
            DivergenceVerdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub n: usize,
    pub re_lambda: f64,
    pub im_lambda: f64,
    /// log(‖y_n‖·‖z_n‖).
    pub log_projector_norm: f64,
    /// log(|⟨f, z_n⟩|·‖y_n‖): the norm of this term of the expansion of f.
    pub log_coefficient: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub rows: Vec<WitnessRow>,
    pub verdict: DivergenceVerdict,
    /// Running max of log ‖𝔓_n‖ over the first half of the sequence.
    pub max_log_first_half: f64,
    /// Running max over the whole sequence.
    pub max_log_full: f64,
}

/// Projector norms and expansion coefficients of f, in expansion order, with
/// a trend verdict on the norms.
pub fn divergence_witness(
    pairs: &[BiorthogonalPair],
    f: &GridFunction2,
) -> Result<DivergenceReport> {
    let order = expansion_order(pairs);
    let mut rows = Vec::with_capacity(order.len());
    for (n, &idx) in order.iter().enumerate() {
        let pair = &pairs[idx];
        check_normalized(pair)?;
        let norm = pair.y.h_norm().mul(pair.z.h_norm());
        let coefficient = f.inner_product(&pair.z)?;
        let log_coefficient = LogMagnitude::from_linear(coefficient.norm())
            .mul(pair.y.h_norm())
            .log_value;
        rows.push(WitnessRow {
            n,
            re_lambda: pair.lambda.re,
            im_lambda: pair.lambda.im,
            log_projector_norm: norm.log_value,
            log_coefficient,
        });
    }
    let running_max = |slice: &[WitnessRow]| {
        slice
            .iter()
            .map(|r| r.log_projector_norm)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (verdict, half, full) = if rows.len() < 3 {
        (
            DivergenceVerdict::Inconclusive,
            running_max(&rows),
            running_max(&rows),
        )
    } else {
        let mid = rows.len() / 2;
        let half = running_max(&rows[..mid]);
        let full = running_max(&rows);
        // trend = total climb of the running max across the scan; a factor
        // of 10 separates growth from quadrature noise
        let verdict = if full - rows[0].log_projector_norm >= 10.0f64.ln() {
            DivergenceVerdict::UnboundedTrend
        } else {
            DivergenceVerdict::Bounded
        };
        (verdict, half, full)
    };
    Ok(DivergenceReport {
        rows,
        verdict,
        max_log_first_half: half,
        max_log_full: full,
    })
}
