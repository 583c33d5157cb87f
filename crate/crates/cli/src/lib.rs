//! Front end for `multspec`: map documents in, canonical JSON reports out.
//!
//! [`run_command`] does everything except touching stdout and the process
//! exit code, so tests drive it directly.

pub mod commands;
pub mod document;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multspec_core::error::ErrorClass;
use multspec_core::{Cplx, Precision};
use num_complex::Complex;
use serde_json::{json, Value};

pub use document::{parse_map_document, serialize_map, MapDocument};
pub use report::{emit_report, ReportDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed map document: {0}")]
    Parse(String),
    #[error("map document shape: {0}")]
    Shape(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(multspec_core::Error),
}

impl From<multspec_core::Error> for CliError {
    fn from(e: multspec_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Shape(_) => "ShapeError",
            CliError::Usage(_) => "UsageError",
            CliError::Io(_) => "IoError",
            CliError::Core(e) => e.kind(),
        }
    }

    pub fn exit_status(&self) -> i32 {
        match self {
            CliError::Core(e) if e.class() == ErrorClass::Numerical => EXIT_NUMERICAL,
            _ => EXIT_DOMAIN,
        }
    }

    fn to_value(&self) -> Value {
        let class = if self.exit_status() == EXIT_NUMERICAL { "numerical" } else { "domain" };
        let mut v = json!({ "kind": self.kind(), "class": class, "message": self.to_string() });
        if let CliError::Core(multspec_core::Error::Superattracting { period }) = self {
            v["period"] = json!(period);
            v["diagnosis"] = json!(format!("superattracting at period {period}"));
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "multspec", version, about = "Multiplier spectra of rational maps on the Riemann sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Precision tier; overrides MULTSPEC_PRECISION.
    #[arg(long, global = true, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Projective distance below which points coincide.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub proj_tol: f64,
    /// Multiplier modulus at or below which a cycle is superattracting.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub superattracting_tol: f64,
    /// Cutoff on |λ^r − 1| for formal periods.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub unity_tol: f64,
    /// Orbit-matching slack in units of root inclusion radii.
    #[arg(long, global = true, default_value_t = 1e3)]
    pub match_factor: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiplier spectrum s_N of a map, or its σ-coordinates.
    Spectrum {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma: bool,
    },
    /// Reciprocal spectrum vector over the window [from, to].
    Tau {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Distance between the τ vectors of two maps.
    Compare {
        #[arg(long)]
        map_a: PathBuf,
        #[arg(long)]
        map_b: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Distances below this count as the same point of moduli space.
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
    },
    /// Flexible Lattès maps of degree 4 and their isospectrality.
    Lattes {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        g2: Option<Cplx<f64>>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        g3: Option<Cplx<f64>>,
        /// Number of sampled curves.
        #[arg(long)]
        family: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        nmax: usize,
        /// σ-distance accepted as isospectral.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Pairwise τ distances over random maps with planted duplicates and conjugates.
    Probe {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        planted_duplicates: usize,
        #[arg(long, default_value_t = 0)]
        planted_conjugates: usize,
        /// Unrelated pairs closer than this are re-examined at extended precision.
        #[arg(long, default_value_t = 1e-10)]
        threshold: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Tau { .. } => "tau",
            Command::Compare { .. } => "compare",
            Command::Lattes { .. } => "lattes",
            Command::Probe { .. } => "probe",
        }
    }
}

/// `"RE,IM"` or a bare real.
pub fn parse_complex(s: &str) -> Result<Cplx<f64>, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let z = match s.split_once(',') {
        Some((re, im)) => Complex::new(parse(re)?, parse(im)?),
        None => Complex::new(parse(s)?, 0.0),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(z)
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_status: i32,
    /// Canonical report bytes; empty for `--help` and `--version`.
    pub report: Vec<u8>,
    /// Text for stdout when clap answers `--help`/`--version` itself.
    pub info: Option<String>,
    pub diagnostics: Vec<String>,
}

/// Runs `argv` (without the program name). `env_precision` is the value of
/// `MULTSPEC_PRECISION`, if set.
pub fn run_command(argv: &[String], env_precision: Option<&str>) -> Outcome {
    let full = std::iter::once("multspec".to_string()).chain(argv.iter().cloned());
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    exit_status: EXIT_OK,
                    report: Vec::new(),
                    info: Some(e.to_string()),
                    diagnostics: vec![],
                };
            }
            let mut r = ReportDocument::new(argv.first().map_or("", String::as_str), argv);
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            r.exit_status = err.exit_status();
            r.error = Some(err.to_value());
            return Outcome {
                exit_status: r.exit_status,
                report: r.to_bytes(),
                info: None,
                diagnostics: vec![err.to_string()],
            };
        }
    };
    let mut report = ReportDocument::new(cli.command.name(), argv);
    let mut diagnostics = Vec::new();
    let result = commands::dispatch(&cli, env_precision, &mut report, &mut diagnostics);
    if let Err(err) = result {
        diagnostics.push(format!("error: {err}"));
        report.exit_status = err.exit_status();
        report.error = Some(err.to_value());
    }
    let bytes = report.to_bytes();
    if let Some(path) = &cli.common.out {
        if let Err(e) = std::fs::write(path, &bytes) {
            let err = CliError::Io(format!("cannot write {}: {e}", path.display()));
            diagnostics.push(format!("error: {err}"));
            report.exit_status = err.exit_status();
            report.error = Some(err.to_value());
            return Outcome { exit_status: report.exit_status, report: report.to_bytes(), info: None, diagnostics };
        }
    }
    Outcome { exit_status: report.exit_status, report: bytes, info: None, diagnostics }
}
