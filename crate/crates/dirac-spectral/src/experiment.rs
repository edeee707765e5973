//! Experiment runner: executes one named command against a parsed config and
//! writes the declared artifacts into an output directory.
//!
//! Every run writes `manifest.toml`, the resolved config echoed back, so a
//! run can be reproduced from its own output. Files are written atomically
//! (temp + rename). All floating-point output goes through one shortest
//! round-trip formatter, which makes re-runs byte-identical; magnitudes that
//! may overflow appear as natural-log columns with a `log_` prefix, and
//! linear columns carry an `inf` sentinel when unrepresentable.

use crate::asymptotics::{asymptotics_ladder, check_ladder, exp_norm_sandwich, lemma1_sweep};
use crate::bvp::{biorthogonal_pair_on, find_eigenvalues, SpectrumReport};
use crate::config::{ExperimentConfig, LambdaSpec, COMMANDS};
use crate::expansion::divergence_witness;
use crate::grid::Grid;
use crate::solver::solve_fundamental;
use crate::space::{GridFunction2, SpectralParameter};
use crate::{Complex, Error, Result};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Run `command` for `cfg`, writing outputs under `out_dir`. Sampled
/// potentials are resolved relative to `base_dir`. Returns the files written.
pub fn run(
    command: &str,
    cfg: &ExperimentConfig,
    base_dir: &Path,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<Vec<PathBuf>> {
    if !COMMANDS.contains(&command) {
        return Err(Error::Config {
            field: "command".into(),
            message: format!("unknown command `{command}`; expected one of {COMMANDS:?}"),
        });
    }
    match threads {
        None => run_inner(command, cfg, base_dir, out_dir),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config {
                    field: "threads".into(),
                    message: e.to_string(),
                })?;
            pool.install(|| run_inner(command, cfg, base_dir, out_dir))
        }
    }
}

fn run_inner(
    command: &str,
    cfg: &ExperimentConfig,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut out = Writes {
        dir: out_dir.to_path_buf(),
        written: Vec::new(),
    };

    let mut resolved = cfg.clone();
    resolved.command = Some(command.to_string());
    out.write("manifest.toml", resolved.to_toml_string().as_bytes())?;

    let v = cfg.potential.load(base_dir)?;
    match command {
        "fundamental" => cmd_fundamental(cfg, &v, &mut out)?,
        "verify-asymptotics" => cmd_verify_asymptotics(cfg, &v, &mut out)?,
        "lemma1-sweep" => cmd_lemma1_sweep(cfg, &v, &mut out)?,
        "eigs" => {
            cmd_eigs(cfg, &v, &mut out)?;
        }
        "expansion-audit" => cmd_expansion_audit(cfg, &v, &mut out)?,
        _ => unreachable!("command list checked above"),
    }
    Ok(out.written)
}

struct Writes {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Writes {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!("{name}.tmp"));
        let io_err = |p: &Path| {
            let path = p.display().to_string();
            move |source: std::io::Error| Error::Io {
                path: path.clone(),
                source,
            }
        };
        std::fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
        std::fs::rename(&tmp, &path).map_err(io_err(&path))?;
        self.written.push(path);
        Ok(())
    }

    fn write_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config {
            field: "output".into(),
            message: format!("serializing {name}: {e}"),
        })?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

/// Shortest round-trip decimal for finite values, `inf`/`-inf`/`nan`
/// sentinels otherwise.
fn num(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format(v).to_string()
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Config {
        field: "output".into(),
        message: e.to_string(),
    };
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::Config {
        field: "output".into(),
        message: e.to_string(),
    })
}

fn single_lambda(cfg: &ExperimentConfig, command: &str) -> Result<Complex> {
    match cfg.lambda {
        LambdaSpec::Value(v) => Ok(v),
        _ => Err(Error::Config {
            field: "lambda.kind".into(),
            message: format!("`{command}` needs a single λ value"),
        }),
    }
}

fn vertical_ray<'a>(cfg: &'a ExperimentConfig, command: &str) -> Result<(f64, &'a [f64])> {
    match &cfg.lambda {
        LambdaSpec::VerticalRay { sigma, tau_values } => Ok((*sigma, tau_values)),
        _ => Err(Error::Config {
            field: "lambda.kind".into(),
            message: format!("`{command}` needs a ray with sigma and tau_values"),
        }),
    }
}

fn region_and_boundary<'a>(
    cfg: &'a ExperimentConfig,
    command: &str,
) -> Result<(crate::bvp::Rectangle, &'a crate::bvp::BoundaryConditions)> {
    let LambdaSpec::Region(rect) = cfg.lambda else {
        return Err(Error::Config {
            field: "lambda.kind".into(),
            message: format!("`{command}` needs a rectangle"),
        });
    };
    let bc = cfg.boundary.as_ref().ok_or_else(|| Error::Config {
        field: "boundary".into(),
        message: format!("`{command}` needs boundary conditions"),
    })?;
    Ok((rect, bc))
}

fn cmd_fundamental(
    cfg: &ExperimentConfig,
    v: &crate::potential::Potential,
    out: &mut Writes,
) -> Result<()> {
    let lambda = single_lambda(cfg, "fundamental")?;
    let grid = match cfg.grid.panel_count {
        Some(pc) => Arc::new(Grid::new(pc, cfg.grid.nodes_per_panel)?),
        None => Arc::new(Grid::for_parameter(lambda)),
    };
    let param = SpectralParameter::auto(lambda);
    let (fm, report) = solve_fundamental(v, param, &grid, cfg.tolerances.picard)?;

    let col1 = fm.dephased_column(1);
    let col2 = fm.dephased_column(2);
    let one = Complex::new(1.0, 0.0);
    let rows = (0..grid.len())
        .map(|i| {
            let x = grid.nodes()[i];
            let (e11, e21) = col1.at(i);
            let (e12, e22) = col2.at(i);
            let b = [e11 - one, e12, e21, e22 - one];
            let mut row = vec![num(x)];
            for z in b {
                row.push(num(z.re));
                row.push(num(z.im));
            }
            row
        })
        .collect();
    let table = csv_bytes(
        &[
            "x", "re_b11", "im_b11", "re_b12", "im_b12", "re_b21", "im_b21", "re_b22", "im_b22",
        ],
        rows,
    )?;
    out.write("remainders.csv", &table)?;
    out.write_json("picard.json", &report)
}

fn cmd_verify_asymptotics(
    cfg: &ExperimentConfig,
    v: &crate::potential::Potential,
    out: &mut Writes,
) -> Result<()> {
    let (sigma, taus) = vertical_ray(cfg, "verify-asymptotics")?;
    let rows = asymptotics_ladder(v, sigma, taus, cfg.tolerances.picard)?;
    let verdict = check_ladder(&rows);

    let header = [
        "tau",
        "re_lambda",
        "im_lambda",
        "log_col1",
        "log_col2",
        "shaped_col1",
        "shaped_col2",
        "log_g11",
        "log_g12",
        "log_g21",
        "log_g22",
        "ghat11",
        "ghat12",
        "ghat21",
        "ghat22",
        "align1",
        "align2",
        "prefactor12",
        "prefactor21",
        "literal12",
        "literal21",
    ];
    let table = rows
        .iter()
        .map(|r| {
            vec![
                num(r.tau),
                num(r.re_lambda),
                num(r.im_lambda),
                num(r.log_col1),
                num(r.log_col2),
                num(r.shaped_col1),
                num(r.shaped_col2),
                num(r.log_g11),
                num(r.log_g12),
                num(r.log_g21),
                num(r.log_g22),
                num(r.ghat11),
                num(r.ghat12),
                num(r.ghat21),
                num(r.ghat22),
                num(r.align1),
                num(r.align2),
                num(r.prefactor12),
                num(r.prefactor21),
                num(r.literal12),
                num(r.literal21),
            ]
        })
        .collect();
    out.write("ladder.csv", &csv_bytes(&header, table)?)?;

    let scan: Vec<f64> = (0..=50).map(f64::from).collect();
    let (plus, minus) = exp_norm_sandwich(&scan);
    out.write_json(
        "sandwich_report.json",
        &serde_json::json!({
            "exp_norm_scan": [plus, minus],
            "ladder": verdict,
        }),
    )
}

fn cmd_lemma1_sweep(
    cfg: &ExperimentConfig,
    v: &crate::potential::Potential,
    out: &mut Writes,
) -> Result<()> {
    let (sigma, taus) = vertical_ray(cfg, "lemma1-sweep")?;
    let outcome = lemma1_sweep(
        v,
        sigma,
        taus,
        &cfg.coefficients,
        cfg.normalize,
        cfg.tolerances.picard,
    )?;

    let mut header = vec!["tau", "log_norm_y", "log_norm_z", "log_inner", "ratio"];
    if cfg.normalize {
        header.push("log_norm_product");
    }
    let rows = outcome
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                num(r.tau),
                num(r.log_norm_y),
                num(r.log_norm_z),
                num(r.log_inner),
                num(r.ratio),
            ];
            if let Some(p) = r.log_norm_product {
                row.push(num(p));
            }
            row
        })
        .collect();
    out.write("lemma1.csv", &csv_bytes(&header, rows)?)?;

    if !outcome.skipped.is_empty() {
        let rows = outcome
            .skipped
            .iter()
            .map(|(tau, reason)| vec![num(*tau), reason.clone()])
            .collect();
        out.write("skipped.csv", &csv_bytes(&["tau", "reason"], rows)?)?;
    }
    Ok(())
}

fn spectrum_json(report: &SpectrumReport) -> serde_json::Value {
    serde_json::json!({
        "region": report.region,
        "winding_total": report.winding_total,
        "eigenvalues": report
            .eigenvalues
            .iter()
            .map(|pt| {
                serde_json::json!({
                    "re_lambda": pt.lambda.re,
                    "im_lambda": pt.lambda.im,
                    "multiplicity": pt.multiplicity,
                    "degenerate": pt.multiplicity > 1,
                })
            })
            .collect::<Vec<_>>(),
    })
}

fn cmd_eigs(
    cfg: &ExperimentConfig,
    v: &crate::potential::Potential,
    out: &mut Writes,
) -> Result<SpectrumReport> {
    let (rect, bc) = region_and_boundary(cfg, "eigs")?;
    let report = find_eigenvalues(v, bc, rect, cfg.tolerances.refine)?;

    let rows = report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(n, pt)| {
            vec![
                n.to_string(),
                num(pt.lambda.re),
                num(pt.lambda.im),
                pt.multiplicity.to_string(),
            ]
        })
        .collect();
    out.write(
        "spectrum.csv",
        &csv_bytes(&["n", "re_lambda", "im_lambda", "multiplicity"], rows)?,
    )?;
    out.write_json("spectrum.json", &spectrum_json(&report))?;
    Ok(report)
}

fn cmd_expansion_audit(
    cfg: &ExperimentConfig,
    v: &crate::potential::Potential,
    out: &mut Writes,
) -> Result<()> {
    let (rect, bc) = region_and_boundary(cfg, "expansion-audit")?;
    let spectrum = find_eigenvalues(v, bc, rect, cfg.tolerances.refine)?;

    // one discretization for the whole family, sized for the worst corner,
    // so the pairs and the probe share a grid
    let grid = Arc::new(Grid::for_parameter(Complex::new(
        rect.re_min.abs().max(rect.re_max.abs()),
        rect.im_min.abs().max(rect.im_max.abs()),
    )));
    let mut pairs = Vec::new();
    let mut skipped: Vec<(Complex, String)> = Vec::new();
    for pt in &spectrum.eigenvalues {
        match biorthogonal_pair_on(v, bc, pt.lambda, &grid, cfg.tolerances.picard) {
            Ok(p) => pairs.push(p),
            Err(
                e @ (Error::DegenerateEigenvalue { .. } | Error::NearDegeneratePairing { .. }),
            ) => skipped.push((pt.lambda, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if pairs.is_empty() {
        return Err(Error::InvalidSweep(
            "no simple eigenvalues with usable pairings in the region".into(),
        ));
    }

    let probe = GridFunction2::from_fn(grid, |_| {
        (Complex::new(1.0, 0.0), Complex::new(1.0, 0.0))
    });
    let report = divergence_witness(&pairs, &probe)?;

    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                num(r.re_lambda),
                num(r.im_lambda),
                num(r.log_projector_norm),
                num(r.log_coefficient.exp()),
            ]
        })
        .collect();
    out.write(
        "divergence.csv",
        &csv_bytes(
            &["n", "re_lambda", "im_lambda", "log_proj_norm", "witness"],
            rows,
        )?,
    )?;
    out.write_json(
        "divergence.json",
        &serde_json::json!({
            "report": report,
            "skipped": skipped
                .iter()
                .map(|(lambda, reason)| {
                    serde_json::json!({
                        "re_lambda": lambda.re,
                        "im_lambda": lambda.im,
                        "reason": reason,
                    })
                })
                .collect::<Vec<_>>(),
        }),
    )
}
