//! Config-driven front end for the dirac-spectral library.
//!
//! A run is a TOML config plus a command. The command comes from the
//! subcommand when given, otherwise from the `command` key in the config;
//! emitted manifests record the command, so `dirac-spectral --config
//! manifest.toml --out <dir>` reproduces a run exactly.
//!
//! Exit status: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 numerical failure.

use clap::{Parser, Subcommand};
use dirac_spectral::config::ExperimentConfig;
use dirac_spectral::{experiment, Error};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dirac-spectral", version, about = "Dirac-system spectral experiments")]
struct Cli {
    /// Experiment description (TOML)
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `output_dir` from the config
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads for the parallel sections (default: all cores)
    #[arg(long)]
    threads: Option<usize>,

    /// RNG seed; overrides `seed` from the config
    #[arg(long)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve one fundamental matrix; writes remainders.csv and picard.json
    Fundamental,
    /// Norm and decay diagnostics along a vertical ray; writes ladder.csv
    /// and sandwich_report.json
    VerifyAsymptotics,
    /// Inner-product ratio table along a vertical ray; writes lemma1.csv
    #[command(name = "lemma1-sweep")]
    Lemma1Sweep,
    /// Locate eigenvalues in a rectangle; writes spectrum.csv and
    /// spectrum.json
    Eigs,
    /// Projector norms over the spectrum in a rectangle; writes
    /// divergence.csv and divergence.json
    ExpansionAudit,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Fundamental => "fundamental",
            Command::VerifyAsymptotics => "verify-asymptotics",
            Command::Lemma1Sweep => "lemma1-sweep",
            Command::Eigs => "eigs",
            Command::ExpansionAudit => "expansion-audit",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code: u8 = if e.is_config() {
                2
            } else if matches!(e, Error::Io { .. }) {
                1
            } else {
                3
            };
            ExitCode::from(code)
        }
    }
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    let mut cfg = ExperimentConfig::from_path(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let command = match cli.command {
        Some(c) => c.name().to_string(),
        None => cfg.command.clone().ok_or_else(|| Error::Config {
            field: "command".into(),
            message: "no subcommand given and the config names no command".into(),
        })?,
    };
    // paths inside the config resolve relative to the config file
    let base_dir = match cli.config.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let out_dir = cli
        .out
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| Error::Config {
            field: "output_dir".into(),
            message: "give --out or set output_dir in the config".into(),
        })?;
    experiment::run(&command, &cfg, &base_dir, Path::new(&out_dir), cli.threads)
}
