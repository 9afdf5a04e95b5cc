//! Command-line driver for the `exposure-lab` numerical core.
//!
//! Every subcommand produces a [`output::ResultEnvelope`] and writes it as
//! CSV (rows only) or JSON (full envelope). Exit codes: 0 success, 1 usage,
//! 2 invalid state or parameters, 3 numerical or IO failure.
// `!(x > y)` rejects NaN along with the failing comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;
pub mod output;

use output::{Format, ResultEnvelope};

pub const THREADS_ENV: &str = "EXPOSURE_LAB_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Invalid(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<exposure_lab::Error> for CliError {
    fn from(e: exposure_lab::Error) -> Self {
        use exposure_lab::Error as E;
        match e {
            E::NumericalFailure(_) | E::Truncation(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "exposure-lab",
    version,
    about = "Onset of coherent-information transfer between quantum systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// σ_z exposure and H_n over the qubit (δ, |α|²) plane.
    ScanQubit(ScanQubitArgs),
    /// Exposure and H_n over an a_z slice of the qutrit family.
    ScanQutrit(ScanQutritArgs),
    /// Exact coherent-information time series for the detector qubit.
    UdwEvolve(UdwEvolveArgs),
    /// Detector closed forms against the generic formulas and the Fock oracle.
    UdwVerify(UdwVerifyArgs),
    /// Onset quantities for states and operators read from JSON files.
    OnsetReport(OnsetReportArgs),
    /// Randomized consistency checks.
    Verify(VerifyArgs),
    /// Spectrum from the n-purities γ_1..γ_d.
    Spectrum(SpectrumArgs),
    /// ε-regularized trace-term tables on the qutrit slice (0.5, λ₁, 0.5 - λ₁).
    DivergenceDemo(DivergenceArgs),
    /// Qubit states of fixed H_n.
    Isocurve(IsocurveArgs),
    /// Smallest and largest σ_z exposure at fixed H_n.
    Extremize(ExtremizeArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct ScanQubitArgs {
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ScanQutritArgs {
    /// Coupling written in S_x, S_y, S_z, I.
    #[arg(long, default_value = "SySz+SzSy")]
    op: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    az: f64,
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    #[arg(long, default_value_t = 61)]
    grid: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct UdwEvolveArgs {
    #[arg(long)]
    delta: f64,
    /// One or more |α|² values.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha2: Vec<f64>,
    #[arg(long, default_value_t = 3.0)]
    tmax: f64,
    /// Number of samples on [0, tmax].
    #[arg(long, default_value_t = 301)]
    steps: usize,
    /// Entropy orders; `vn` for von Neumann.
    #[arg(long, value_delimiter = ',', default_value = "2,vn", value_parser = parse_index)]
    n: Vec<String>,
    /// Fock levels kept for the field mode.
    #[arg(long, default_value_t = exposure_lab::channels::DEFAULT_FOCK_LEVELS)]
    levels: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct UdwVerifyArgs {
    #[arg(long)]
    delta: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    alpha2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    n: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    tmax: f64,
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[arg(long, default_value_t = exposure_lab::channels::DEFAULT_FOCK_LEVELS)]
    levels: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct OnsetReportArgs {
    /// JSON matrix of [re, im] pairs, row-major.
    #[arg(long)]
    rho_a: PathBuf,
    #[arg(long)]
    rho_b: PathBuf,
    #[arg(long)]
    op_a: PathBuf,
    #[arg(long)]
    op_b: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    n: Vec<f64>,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct VerifyArgs {
    #[arg(value_parser = parse_check)]
    check: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SpectrumArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    purities: Vec<f64>,
    /// Hilbert-space dimension; defaults to the number of purities.
    #[arg(long)]
    dim: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Coupling {
    /// Every |a_ij| = 1.
    Ones,
    /// Fixed asymmetric real coupling.
    Test,
}

#[derive(Debug, Clone, Args, Serialize)]
struct DivergenceArgs {
    #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-3,1e-2")]
    eps: Vec<f64>,
    /// Uniform points on λ₁ ∈ [0, 0.5]; decade points down to 1e-8 are added.
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Coupling::Ones)]
    coupling: Coupling,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct IsocurveArgs {
    /// Target entropy H_n.
    #[arg(long)]
    h2: f64,
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    #[arg(long, default_value_t = exposure_lab::statespace::ISOCURVE_POINTS)]
    points: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ExtremizeArgs {
    #[arg(long)]
    h2: f64,
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

fn parse_index(s: &str) -> Result<String, String> {
    commands::index_from_str(s).map(|_| s.trim().to_owned())
}

fn parse_check(s: &str) -> Result<String, String> {
    s.parse::<exposure_lab::verify::Check>()
        .map(|c| c.name().to_owned())
        .map_err(|e| e.to_string())
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::ScanQubit(a) => &a.output,
            Command::ScanQutrit(a) => &a.output,
            Command::UdwEvolve(a) => &a.output,
            Command::UdwVerify(a) => &a.output,
            Command::OnsetReport(a) => &a.output,
            Command::Verify(a) => &a.output,
            Command::Spectrum(a) => &a.output,
            Command::DivergenceDemo(a) => &a.output,
            Command::Isocurve(a) => &a.output,
            Command::Extremize(a) => &a.output,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("exposure-lab: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command) -> Result<i32, CliError> {
    configure_threads()?;
    let result = commands::dispatch(command)?;
    let out = command.output();
    let format = Format::infer(out.format, out.out.as_deref());
    let text = result.envelope.render(format);
    let rows = result.envelope.table.rows.len();
    let status = result
        .verdict
        .map(|ok| if ok { "PASS, " } else { "FAIL, " })
        .unwrap_or("");
    match &out.out {
        Some(path) => {
            output::write_atomic(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            println!("{}: {status}{rows} rows -> {}", result.envelope.command, path.display());
        }
        None => {
            print!("{text}");
            eprintln!("{}: {status}{rows} rows", result.envelope.command);
        }
    }
    Ok(match result.verdict {
        Some(false) => 3,
        _ => 0,
    })
}

/// What a command hands back to the driver.
struct Outcome {
    envelope: ResultEnvelope,
    /// Pass/fail for commands that check something.
    verdict: Option<bool>,
}
