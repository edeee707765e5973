//! TOML experiment configuration: declarative descriptions of a potential, a
//! λ selection (single value, vertical/horizontal ray, or search rectangle),
//! boundary conditions, combination coefficients, and tolerances.
//!
//! Parsing is strict: unknown keys and malformed values are configuration
//! errors naming the offending field. Sampled potentials are validated here
//! but loaded from disk separately, so parsing a string never touches the
//! filesystem.

use crate::asymptotics::CombinationCoefficients;
use crate::bvp::{BoundaryConditions, Rectangle};
use crate::potential::Potential;
use crate::{Complex, Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const COMMANDS: [&str; 5] = [
    "fundamental",
    "verify-asymptotics",
    "lemma1-sweep",
    "eigs",
    "expansion-audit",
];

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_NODES_PER_PANEL: usize = 10;
pub const DEFAULT_PICARD_TOL: f64 = 1e-12;
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    Constant {
        p: Complex,
        q: Complex,
    },
    TrigPoly {
        p_terms: Vec<(i32, Complex)>,
        q_terms: Vec<(i32, Complex)>,
    },
    Sampled {
        path: String,
    },
}

impl PotentialSpec {
    /// Materialize the potential; sampled data is read relative to `base`.
    pub fn load(&self, base: &Path) -> Result<Potential> {
        match self {
            PotentialSpec::Zero => Ok(Potential::Zero),
            PotentialSpec::Constant { p, q } => Ok(Potential::constant(*p, *q)),
            PotentialSpec::TrigPoly { p_terms, q_terms } => Ok(Potential::TrigPoly {
                p_coeffs: p_terms.clone(),
                q_coeffs: q_terms.clone(),
            }),
            PotentialSpec::Sampled { path } => Potential::from_csv_path(&base.join(path)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSpec {
    /// One spectral parameter.
    Value(Complex),
    /// Vertical ladder σ + iτ for τ in the list.
    VerticalRay { sigma: f64, tau_values: Vec<f64> },
    /// Horizontal scan σ + iτ for σ in the list.
    HorizontalRay { tau: f64, sigma_values: Vec<f64> },
    /// Search region.
    Region(Rectangle),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Number of panels; `None` sizes the grid from λ.
    pub panel_count: Option<usize>,
    pub nodes_per_panel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub picard: f64,
    pub refine: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub potential: PotentialSpec,
    pub grid: GridSpec,
    pub lambda: LambdaSpec,
    pub boundary: Option<BoundaryConditions>,
    pub coefficients: CombinationCoefficients,
    pub normalize: bool,
    pub tolerances: Tolerances,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    potential: Option<RawPotential>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<RawGrid>,
    lambda: RawLambda,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary: Option<RawBoundary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<RawCoefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerances: Option<RawTolerances>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_freqs: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_coeffs: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_freqs: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_coeffs: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    panel_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes_per_panel: Option<usize>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawLambda {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im_range: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawBoundary {
    a: [[[f64; 2]; 4]; 2],
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficients {
    #[serde(skip_serializing_if = "Option::is_none")]
    c1: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c2: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c1_adj: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c2_adj: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalize: Option<bool>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    picard: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refine: Option<f64>,
}

fn complex_of(pair: [f64; 2]) -> Complex {
    Complex::new(pair[0], pair[1])
}

fn pair_of(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

fn require_finite(field: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(config_err(field, "value must be finite"));
    }
    Ok(())
}

fn build_potential(raw: Option<RawPotential>) -> Result<PotentialSpec> {
    let Some(raw) = raw else {
        return Ok(PotentialSpec::Zero);
    };
    match raw.kind.as_str() {
        "zero" => Ok(PotentialSpec::Zero),
        "constant" => {
            let p = raw
                .p
                .ok_or_else(|| config_err("potential.p", "constant potential needs `p`"))?;
            let q = raw
                .q
                .ok_or_else(|| config_err("potential.q", "constant potential needs `q`"))?;
            require_finite("potential.p", &p)?;
            require_finite("potential.q", &q)?;
            Ok(PotentialSpec::Constant {
                p: complex_of(p),
                q: complex_of(q),
            })
        }
        "trig-poly" => {
            let terms = |freqs: Option<Vec<i32>>,
                         coeffs: Option<Vec<[f64; 2]>>,
                         field: &str|
             -> Result<Vec<(i32, Complex)>> {
                let freqs = freqs.unwrap_or_default();
                let coeffs = coeffs.unwrap_or_default();
                if freqs.len() != coeffs.len() {
                    return Err(config_err(
                        field,
                        format!(
                            "frequency and coefficient lists differ in length: {} vs {}",
                            freqs.len(),
                            coeffs.len()
                        ),
                    ));
                }
                for c in &coeffs {
                    require_finite(field, c)?;
                }
                Ok(freqs.into_iter().zip(coeffs.into_iter().map(complex_of)).collect())
            };
            Ok(PotentialSpec::TrigPoly {
                p_terms: terms(raw.p_freqs, raw.p_coeffs, "potential.p_coeffs")?,
                q_terms: terms(raw.q_freqs, raw.q_coeffs, "potential.q_coeffs")?,
            })
        }
        "sampled" => {
            let path = raw
                .path
                .ok_or_else(|| config_err("potential.path", "sampled potential needs `path`"))?;
            if path.is_empty() {
                return Err(config_err("potential.path", "path must not be empty"));
            }
            Ok(PotentialSpec::Sampled { path })
        }
        other => Err(config_err(
            "potential.kind",
            format!("unknown kind `{other}`; expected zero, constant, trig-poly, or sampled"),
        )),
    }
}

fn build_lambda(raw: RawLambda) -> Result<LambdaSpec> {
    match raw.kind.as_str() {
        "value" => {
            let v = raw
                .value
                .ok_or_else(|| config_err("lambda.value", "kind `value` needs `value`"))?;
            require_finite("lambda.value", &v)?;
            Ok(LambdaSpec::Value(complex_of(v)))
        }
        "ray" => {
            let vertical = raw.sigma.is_some() || raw.tau_values.is_some();
            let horizontal = raw.tau.is_some() || raw.sigma_values.is_some();
            if vertical && horizontal {
                return Err(config_err(
                    "lambda",
                    "a ray takes either sigma with tau_values, or tau with sigma_values, not both",
                ));
            }
            if vertical {
                let sigma = raw
                    .sigma
                    .ok_or_else(|| config_err("lambda.sigma", "vertical ray needs `sigma`"))?;
                let taus = raw.tau_values.ok_or_else(|| {
                    config_err("lambda.tau_values", "vertical ray needs `tau_values`")
                })?;
                require_finite("lambda.sigma", &[sigma])?;
                require_finite("lambda.tau_values", &taus)?;
                if taus.is_empty() {
                    return Err(config_err("lambda.tau_values", "list must not be empty"));
                }
                Ok(LambdaSpec::VerticalRay {
                    sigma,
                    tau_values: taus,
                })
            } else if horizontal {
                let tau = raw
                    .tau
                    .ok_or_else(|| config_err("lambda.tau", "horizontal ray needs `tau`"))?;
                let sigmas = raw.sigma_values.ok_or_else(|| {
                    config_err("lambda.sigma_values", "horizontal ray needs `sigma_values`")
                })?;
                require_finite("lambda.tau", &[tau])?;
                require_finite("lambda.sigma_values", &sigmas)?;
                if sigmas.is_empty() {
                    return Err(config_err("lambda.sigma_values", "list must not be empty"));
                }
                Ok(LambdaSpec::HorizontalRay {
                    tau,
                    sigma_values: sigmas,
                })
            } else {
                Err(config_err(
                    "lambda",
                    "a ray needs sigma with tau_values, or tau with sigma_values",
                ))
            }
        }
        "rectangle" => {
            let re = raw.re_range.ok_or_else(|| {
                config_err("lambda.re_range", "kind `rectangle` needs `re_range`")
            })?;
            let im = raw.im_range.ok_or_else(|| {
                config_err("lambda.im_range", "kind `rectangle` needs `im_range`")
            })?;
            let rect = Rectangle::new((re[0], re[1]), (im[0], im[1]))?;
            Ok(LambdaSpec::Region(rect))
        }
        other => Err(config_err(
            "lambda.kind",
            format!("unknown kind `{other}`; expected value, ray, or rectangle"),
        )),
    }
}

impl ExperimentConfig {
    /// Parse a TOML document. Never reads the filesystem.
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        let raw: RawConfig = toml::from_str(text)
            .map_err(|e| config_err("toml", e.to_string()))?;

        if let Some(cmd) = &raw.command {
            if !COMMANDS.contains(&cmd.as_str()) {
                return Err(config_err(
                    "command",
                    format!("unknown command `{cmd}`; expected one of {COMMANDS:?}"),
                ));
            }
        }

        let grid = raw.grid.unwrap_or(RawGrid {
            panel_count: None,
            nodes_per_panel: None,
        });
        if let Some(pc) = grid.panel_count {
            if pc == 0 {
                return Err(config_err("grid.panel_count", "must be at least 1"));
            }
        }
        let nodes_per_panel = grid.nodes_per_panel.unwrap_or(DEFAULT_NODES_PER_PANEL);

        let tol = raw.tolerances.unwrap_or(RawTolerances {
            picard: None,
            refine: None,
        });
        let picard = tol.picard.unwrap_or(DEFAULT_PICARD_TOL);
        let refine = tol.refine.unwrap_or(DEFAULT_REFINE_TOL);
        if !(picard.is_finite() && picard > 0.0) {
            return Err(config_err("tolerances.picard", "must be a positive number"));
        }
        if !(refine.is_finite() && refine > 0.0) {
            return Err(config_err("tolerances.refine", "must be a positive number"));
        }

        let boundary = match raw.boundary {
            None => None,
            Some(b) => {
                let mut a = [[Complex::new(0.0, 0.0); 4]; 2];
                for i in 0..2 {
                    for j in 0..4 {
                        require_finite("boundary.a", &b.a[i][j])?;
                        a[i][j] = complex_of(b.a[i][j]);
                    }
                }
                Some(BoundaryConditions::new(a)?)
            }
        };

        let rc = raw.coefficients.unwrap_or(RawCoefficients {
            c1: None,
            c2: None,
            c1_adj: None,
            c2_adj: None,
            normalize: None,
        });
        let one = [1.0, 0.0];
        for (field, v) in [
            ("coefficients.c1", rc.c1.unwrap_or(one)),
            ("coefficients.c2", rc.c2.unwrap_or(one)),
            ("coefficients.c1_adj", rc.c1_adj.unwrap_or(one)),
            ("coefficients.c2_adj", rc.c2_adj.unwrap_or(one)),
        ] {
            require_finite(field, &v)?;
        }
        let coefficients = CombinationCoefficients {
            c1: complex_of(rc.c1.unwrap_or(one)),
            c2: complex_of(rc.c2.unwrap_or(one)),
            c1_adj: complex_of(rc.c1_adj.unwrap_or(one)),
            c2_adj: complex_of(rc.c2_adj.unwrap_or(one)),
        };

        Ok(ExperimentConfig {
            command: raw.command,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            output_dir: raw.output_dir.map(PathBuf::from),
            potential: build_potential(raw.potential)?,
            grid: GridSpec {
                panel_count: grid.panel_count,
                nodes_per_panel,
            },
            lambda: build_lambda(raw.lambda)?,
            boundary,
            coefficients,
            normalize: rc.normalize.unwrap_or(false),
            tolerances: Tolerances { picard, refine },
        })
    }

    pub fn from_path(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Serialize the resolved configuration, with every default made
    /// explicit and `output_dir` stripped. The output re-parses to an equal
    /// config and re-serializes to identical bytes, which makes emitted
    /// manifests stable across runs.
    pub fn to_toml_string(&self) -> String {
        let potential = match &self.potential {
            PotentialSpec::Zero => RawPotential {
                kind: "zero".into(),
                p: None,
                q: None,
                p_freqs: None,
                p_coeffs: None,
                q_freqs: None,
                q_coeffs: None,
                path: None,
            },
            PotentialSpec::Constant { p, q } => RawPotential {
                kind: "constant".into(),
                p: Some(pair_of(*p)),
                q: Some(pair_of(*q)),
                p_freqs: None,
                p_coeffs: None,
                q_freqs: None,
                q_coeffs: None,
                path: None,
            },
            PotentialSpec::TrigPoly { p_terms, q_terms } => RawPotential {
                kind: "trig-poly".into(),
                p: None,
                q: None,
                p_freqs: Some(p_terms.iter().map(|t| t.0).collect()),
                p_coeffs: Some(p_terms.iter().map(|t| pair_of(t.1)).collect()),
                q_freqs: Some(q_terms.iter().map(|t| t.0).collect()),
                q_coeffs: Some(q_terms.iter().map(|t| pair_of(t.1)).collect()),
                path: None,
            },
            PotentialSpec::Sampled { path } => RawPotential {
                kind: "sampled".into(),
                p: None,
                q: None,
                p_freqs: None,
                p_coeffs: None,
                q_freqs: None,
                q_coeffs: None,
                path: Some(path.clone()),
            },
        };
        let lambda = match &self.lambda {
            LambdaSpec::Value(v) => RawLambda {
                kind: "value".into(),
                value: Some(pair_of(*v)),
                sigma: None,
                tau_values: None,
                tau: None,
                sigma_values: None,
                re_range: None,
                im_range: None,
            },
            LambdaSpec::VerticalRay { sigma, tau_values } => RawLambda {
                kind: "ray".into(),
                value: None,
                sigma: Some(*sigma),
                tau_values: Some(tau_values.clone()),
                tau: None,
                sigma_values: None,
                re_range: None,
                im_range: None,
            },
            LambdaSpec::HorizontalRay { tau, sigma_values } => RawLambda {
                kind: "ray".into(),
                value: None,
                sigma: None,
                tau_values: None,
                tau: Some(*tau),
                sigma_values: Some(sigma_values.clone()),
                re_range: None,
                im_range: None,
            },
            LambdaSpec::Region(r) => RawLambda {
                kind: "rectangle".into(),
                value: None,
                sigma: None,
                tau_values: None,
                tau: None,
                sigma_values: None,
                re_range: Some([r.re_min, r.re_max]),
                im_range: Some([r.im_min, r.im_max]),
            },
        };
        let raw = RawConfig {
            command: self.command.clone(),
            seed: Some(self.seed),
            output_dir: None,
            potential: Some(potential),
            grid: Some(RawGrid {
                panel_count: self.grid.panel_count,
                nodes_per_panel: Some(self.grid.nodes_per_panel),
            }),
            lambda,
            boundary: self.boundary.as_ref().map(|bc| {
                let mut a = [[[0.0; 2]; 4]; 2];
                for i in 0..2 {
                    for j in 0..4 {
                        a[i][j] = pair_of(bc.matrix()[i][j]);
                    }
                }
                RawBoundary { a }
            }),
            coefficients: Some(RawCoefficients {
                c1: Some(pair_of(self.coefficients.c1)),
                c2: Some(pair_of(self.coefficients.c2)),
                c1_adj: Some(pair_of(self.coefficients.c1_adj)),
                c2_adj: Some(pair_of(self.coefficients.c2_adj)),
                normalize: Some(self.normalize),
            }),
            tolerances: Some(RawTolerances {
                picard: Some(self.tolerances.picard),
                refine: Some(self.tolerances.refine),
            }),
        };
        toml::to_string(&raw).expect("resolved config serializes")
    }
}
