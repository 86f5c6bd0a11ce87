//! `dibsi`: experiments with domain-informed B-spline interpolation.
//!
//! Every command writes its output file plus `<out>.manifest.json`, which
//! records the full flag set and seed. Exit status is 0 on success, 1 for
//! bad input and 2 for numerical failures.

// `!(a < b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod lists;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::lists::{parse_real_list, parse_usize_list};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UsizeList(pub Vec<usize>);

impl FromStr for UsizeList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_usize_list(s).map(UsizeList)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_real_list(s).map(RealList)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dibsi",
    version,
    about = "Domain-informed B-spline interpolation experiments"
)]
struct Cli {
    /// Worker threads (default: $DIBSI_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Realize a random inhomogeneous domain and write it to disk.
    RealizeDomain(RealizeArgs),
    /// Tabulate basis kernels.
    ExportBasis(ExportArgs),
    /// Ensemble domain-basis coherence factors.
    Coherence(CoherenceArgs),
    /// Interpolate a sample file with both DIBSI and BSI.
    Interpolate(InterpolateArgs),
    /// Monte Carlo error study.
    Simulate(SimulateArgs),
    /// Separable upsampling of an image guided by a probability atlas.
    Upsample2d(UpsampleArgs),
    /// Smallest and largest Gram eigenvalues over random domains.
    RieszCheck(RieszArgs),
}

/// Random-domain generator settings shared by the ensemble commands.
#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    /// Subdomains J.
    #[arg(long, default_value_t = 2)]
    pub subdomains: usize,
    /// Meyer kernels K.
    #[arg(long, default_value_t = 9)]
    pub kernels: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 30.0)]
    pub hi: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct RealizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
    /// Warp increments (default: one per kernel).
    #[arg(long)]
    pub warp_knots: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Domain manifest to write; values go to the same stem with `.csv`.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    /// Domain manifest; without it the standard B-spline basis is exported.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Sampling step T.
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 10.0)]
    pub gamma: f64,
    /// First kernel index (default: first sample of the domain).
    #[arg(long, allow_negative_numbers = true)]
    pub k_min: Option<i64>,
    /// Last kernel index (default: last sample of the domain).
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: Option<i64>,
    /// Spacing in kernel coordinates.
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CoherenceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value = "1..7")]
    pub orders: UsizeList,
    #[arg(long, default_value = "1,5,10,20,50")]
    pub gamma: RealList,
    #[arg(long, default_value_t = 50)]
    pub domains: usize,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct InterpolateArgs {
    /// CSV of `k, value` rows (consecutive k; an optional header is skipped).
    #[arg(long)]
    pub samples: PathBuf,
    /// Domain manifest.
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Sampling step T.
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 10.0)]
    pub gamma: f64,
    /// Output spacing (default T/10).
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 20)]
    pub domains: usize,
    #[arg(long, default_value_t = 20)]
    pub signals: usize,
    #[arg(long, default_value = "1..6")]
    pub orders: UsizeList,
    #[arg(long, default_value = "0.1:0.1:1")]
    pub steps: RealList,
    #[arg(long, default_value_t = 10.0)]
    pub gamma: f64,
    /// Knot jitter α in [0, 0.5).
    #[arg(long, default_value_t = 0.25)]
    pub jitter: f64,
    /// Ground-truth spline order (default: the interpolation order).
    #[arg(long)]
    pub truth_order: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassOrderArg {
    Rows,
    Columns,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Dibsi,
    Bsi,
}

#[derive(Debug, Args, Serialize)]
pub struct UpsampleArgs {
    /// Image: `.csv` matrix or raw little-endian f64 with a `.json` header.
    #[arg(long)]
    pub image: PathBuf,
    /// Atlas manifest `{ratio, maps}`.
    #[arg(long)]
    pub atlas: PathBuf,
    /// Pixel size for CSV images.
    #[arg(long, default_value_t = 1.0)]
    pub pixel_size: f64,
    #[arg(long, default_value_t = 10)]
    pub factor: usize,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 10.0)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = PassOrderArg::Rows)]
    pub pass_order: PassOrderArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Dibsi)]
    pub method: MethodArg,
    /// Output image, same formats as the input.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RieszArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 100)]
    pub domains: usize,
    #[arg(long, default_value = "1..4")]
    pub orders: UsizeList,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 10.0)]
    pub gamma: f64,
    /// Quadrature spacing (default T/100).
    #[arg(long)]
    pub quad_step: Option<f64>,
    /// Smallest acceptable lower bound.
    #[arg(long, default_value_t = 1e-8)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Lib(dibsi::Error),
    Usage(String),
    CheckFailed(String),
}

impl From<dibsi::Error> for CliError {
    fn from(e: dibsi::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 2,
            CliError::CheckFailed(_) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => e.fmt(f),
            CliError::Usage(m) | CliError::CheckFailed(m) => f.write_str(m),
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("DIBSI_THREADS") {
        Ok(v) if !v.trim().is_empty() => v.trim().parse().map(Some).map_err(|_| {
            CliError::Usage(format!(
                "DIBSI_THREADS must be a positive integer, got {v:?}"
            ))
        }),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = thread_count(cli.threads)?;
    if threads == Some(0) {
        return Err(CliError::Usage("thread count must be positive".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let start = Instant::now();
    let (name, flags, seed, out) = match &cli.command {
        Command::RealizeDomain(a) => ("realize-domain", to_flags(a), Some(a.seed), &a.out),
        Command::ExportBasis(a) => ("export-basis", to_flags(a), None, &a.out),
        Command::Coherence(a) => ("coherence", to_flags(a), Some(a.seed), &a.out),
        Command::Interpolate(a) => ("interpolate", to_flags(a), None, &a.out),
        Command::Simulate(a) => ("simulate", to_flags(a), Some(a.seed), &a.out),
        Command::Upsample2d(a) => ("upsample2d", to_flags(a), None, &a.out),
        Command::RieszCheck(a) => ("riesz-check", to_flags(a), Some(a.seed), &a.out),
    };
    let outcome = pool.install(|| match &cli.command {
        Command::RealizeDomain(a) => commands::realize_domain(a),
        Command::ExportBasis(a) => commands::export_basis(a),
        Command::Coherence(a) => commands::coherence(a),
        Command::Interpolate(a) => commands::interpolate(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Upsample2d(a) => commands::upsample2d(a),
        Command::RieszCheck(a) => commands::riesz_check(a),
    });
    // a failed check still leaves a complete output behind
    if matches!(outcome, Ok(()) | Err(CliError::CheckFailed(_))) {
        let mut flags = flags;
        flags["threads"] = threads.map_or(serde_json::Value::Null, Into::into);
        manifest::write(
            out,
            &manifest::RunManifest {
                subcommand: name.to_string(),
                flags,
                master_seed: seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                wall_time_seconds: start.elapsed().as_secs_f64(),
            },
        )?;
    }
    outcome
}

fn to_flags<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("flags serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
