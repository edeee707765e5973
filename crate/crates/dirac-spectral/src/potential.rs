//! Off-diagonal potentials V = ((0, P), (Q, 0)) with L₁ entries on (0, π).
//!
//! The adjoint system swaps and conjugates the entries: P* = conj(Q),
//! Q* = conj(P). Applying `adjoint` twice returns the original potential.

use crate::grid::Grid;
use crate::{Complex, Error, Result};
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

const COVER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    Constant {
        p: Complex,
        q: Complex,
    },
    /// Trigonometric polynomials Σ c·e^{i n x} keyed by integer frequency.
    TrigPoly {
        p_coeffs: Vec<(i32, Complex)>,
        q_coeffs: Vec<(i32, Complex)>,
    },
    /// Tabulated values with linear interpolation between sample points.
    Sampled {
        nodes: Vec<f64>,
        p: Vec<Complex>,
        q: Vec<Complex>,
    },
}

impl Potential {
    pub fn constant(p: Complex, q: Complex) -> Potential {
        Potential::Constant { p, q }
    }

    pub fn sampled(nodes: Vec<f64>, p: Vec<Complex>, q: Vec<Complex>) -> Result<Potential> {
        if nodes.len() < 2 || nodes.len() != p.len() || nodes.len() != q.len() {
            return Err(Error::InvalidGrid(format!(
                "sampled potential needs matching node/value lists of length >= 2, got {}/{}/{}",
                nodes.len(),
                p.len(),
                q.len()
            )));
        }
        for win in nodes.windows(2) {
            if !(win[1] > win[0]) {
                return Err(Error::InvalidGrid(format!(
                    "sample abscissae must be strictly increasing, found {} after {}",
                    win[1], win[0]
                )));
            }
        }
        if nodes[0] > COVER_TOL || nodes[nodes.len() - 1] < PI - COVER_TOL {
            return Err(Error::InvalidGrid(format!(
                "sample abscissae must cover [0, {:.6}], got [{}, {}]",
                PI,
                nodes[0],
                nodes[nodes.len() - 1]
            )));
        }
        let finite = |vs: &[Complex]| vs.iter().all(|v| v.re.is_finite() && v.im.is_finite());
        if !nodes.iter().all(|x| x.is_finite()) || !finite(&p) || !finite(&q) {
            return Err(Error::InvalidGrid(
                "sampled potential contains non-finite values".into(),
            ));
        }
        Ok(Potential::Sampled { nodes, p, q })
    }

    /// Entry values (P(x), Q(x)).
    pub fn evaluate(&self, x: f64) -> (Complex, Complex) {
        match self {
            Potential::Zero => (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)),
            Potential::Constant { p, q } => (*p, *q),
            Potential::TrigPoly { p_coeffs, q_coeffs } => {
                let eval = |coeffs: &[(i32, Complex)]| {
                    coeffs
                        .iter()
                        .map(|&(n, c)| c * (Complex::new(0.0, f64::from(n) * x)).exp())
                        .sum()
                };
                (eval(p_coeffs), eval(q_coeffs))
            }
            Potential::Sampled { nodes, p, q } => {
                let t = x.clamp(nodes[0], nodes[nodes.len() - 1]);
                let hi = nodes.partition_point(|&n| n < t).min(nodes.len() - 1).max(1);
                let lo = hi - 1;
                let span = nodes[hi] - nodes[lo];
                let s = ((t - nodes[lo]) / span).clamp(0.0, 1.0);
                (
                    p[lo] * (1.0 - s) + p[hi] * s,
                    q[lo] * (1.0 - s) + q[hi] * s,
                )
            }
        }
    }

    /// Both entries sampled on every grid node.
    pub fn values_on(&self, grid: &Grid) -> (Vec<Complex>, Vec<Complex>) {
        grid.nodes().iter().map(|&x| self.evaluate(x)).unzip()
    }

    /// Potential of the adjoint system: P* = conj(Q), Q* = conj(P).
    pub fn adjoint(&self) -> Potential {
        let conj_coeffs = |coeffs: &[(i32, Complex)]| {
            coeffs.iter().map(|&(n, c)| (-n, c.conj())).collect()
        };
        match self {
            Potential::Zero => Potential::Zero,
            Potential::Constant { p, q } => Potential::Constant {
                p: q.conj(),
                q: p.conj(),
            },
            Potential::TrigPoly { p_coeffs, q_coeffs } => Potential::TrigPoly {
                p_coeffs: conj_coeffs(q_coeffs),
                q_coeffs: conj_coeffs(p_coeffs),
            },
            Potential::Sampled { nodes, p, q } => Potential::Sampled {
                nodes: nodes.clone(),
                p: q.iter().map(Complex::conj).collect(),
                q: p.iter().map(Complex::conj).collect(),
            },
        }
    }

    /// L₁ norms (∫|P|, ∫|Q|) approximated on the given grid.
    pub fn l1_norms(&self, grid: &Grid) -> (f64, f64) {
        let (p, q) = self.values_on(grid);
        let norm = |vs: &[Complex]| {
            grid.weights()
                .iter()
                .zip(vs)
                .map(|(&w, v)| w * v.norm())
                .sum()
        };
        (norm(&p), norm(&q))
    }

    /// Parses a sampled potential from CSV bytes. The header must be exactly
    /// `x,re_p,im_p,re_q,im_q`; abscissae must be strictly increasing and
    /// cover [0, π]. Errors carry the 1-based line of the offending record.
    pub fn from_csv_bytes(bytes: &[u8]) -> Result<Potential> {
        Self::from_csv_reader(bytes, "<bytes>")
    }

    pub fn from_csv_path(path: &Path) -> Result<Potential> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_reader(file, &path.display().to_string())
    }

    fn from_csv_reader<R: Read>(reader: R, path: &str) -> Result<Potential> {
        let bad = |line: u64, message: String| Error::CsvFormat {
            path: path.to_string(),
            line,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| bad(1, format!("unreadable header: {e}")))?
            .clone();
        let expected = ["x", "re_p", "im_p", "re_q", "im_q"];
        if headers.iter().ne(expected) {
            return Err(bad(
                1,
                format!(
                    "header must be `{}`, got `{}`",
                    expected.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut nodes = Vec::new();
        let mut p = Vec::new();
        let mut q = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, csv::Position::line);
                bad(line, format!("malformed record: {e}"))
            })?;
            let line = record.position().map_or(0, csv::Position::line);
            if record.len() != 5 {
                return Err(bad(line, format!("expected 5 fields, got {}", record.len())));
            }
            let mut fields = [0.0f64; 5];
            for (i, raw) in record.iter().enumerate() {
                let v: f64 = raw.parse().map_err(|_| {
                    bad(line, format!("field `{}` is not a number: `{raw}`", expected[i]))
                })?;
                if !v.is_finite() {
                    return Err(bad(line, format!("field `{}` is not finite", expected[i])));
                }
                fields[i] = v;
            }
            if let Some(&last) = nodes.last() {
                if fields[0] <= last {
                    return Err(bad(
                        line,
                        format!("x values must be strictly increasing, {} after {last}", fields[0]),
                    ));
                }
            }
            nodes.push(fields[0]);
            p.push(Complex::new(fields[1], fields[2]));
            q.push(Complex::new(fields[3], fields[4]));
        }
        if nodes.len() < 2 {
            return Err(bad(0, format!("need at least 2 sample rows, got {}", nodes.len())));
        }
        if nodes[0] > COVER_TOL || nodes[nodes.len() - 1] < PI - COVER_TOL {
            return Err(bad(
                0,
                format!(
                    "samples must cover [0, {:.6}], got [{}, {}]",
                    PI,
                    nodes[0],
                    nodes[nodes.len() - 1]
                ),
            ));
        }
        Ok(Potential::Sampled { nodes, p, q })
    }
}
