//! `fraczero` — command-line laboratory for zero-energy eigenpairs of
//! fractional Schrödinger operators `(-Δ)^{α/2} + V`.
//!
//! Subcommands map onto the core toolkits: closed-form eigenpair tables
//! (`eigenpair`), pointwise operator residuals (`residual`), decay
//! classification (`classify`), scenario/envelope prediction (`predict`),
//! Monte Carlo estimators (`simulate`), tail fitting (`fit`), and the
//! aggregate verification suites (`verify`).
//!
//! Every run emits a single report: JSON (default) or CSV for the tabular
//! commands. Reports embed the fully resolved configuration; volatile
//! metadata (timestamps) lives in a separate `meta` field so that
//! identically configured runs produce byte-identical `config` and
//! `result` sections.

// Guards on user-supplied floats are written `!(a > b)` rather than `a <= b`
// so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fraczero_core::eigenpair::EigenpairError;
use fraczero_core::fraclap::FracLapError;
use fraczero_core::levysim::LevySimError;
use fraczero_core::potential::PotentialError;
use fraczero_core::specfun::SpecFunError;

use output::OutputFormat;

/// A command failure with its process exit code: configuration problems
/// exit 2, numerical failures exit 3. (Verification-criterion failures are
/// not errors; `verify` reports them and exits 1.)
#[derive(Debug)]
pub(crate) enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<EigenpairError> for CliError {
    fn from(e: EigenpairError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<PotentialError> for CliError {
    fn from(e: PotentialError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SpecFunError> for CliError {
    fn from(e: SpecFunError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<FracLapError> for CliError {
    fn from(e: FracLapError) -> Self {
        match e {
            FracLapError::NonFinite { .. } | FracLapError::SpecFun(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<LevySimError> for CliError {
    fn from(e: LevySimError) -> Self {
        match e {
            LevySimError::Potential(inner) => CliError::Numerical(inner.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<fraczero_core::decaylab::DecayLabError> for CliError {
    fn from(e: fraczero_core::decaylab::DecayLabError) -> Self {
        use fraczero_core::decaylab::DecayLabError as E;
        match e {
            E::IllConditioned => CliError::Numerical(e.to_string()),
            E::Process(inner) => inner.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o failure: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fraczero",
    version,
    about = "Zero-energy eigenpairs of fractional Schrödinger operators: \
             tables, residuals, decay classification, Monte Carlo, and \
             verification suites",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug)]
struct GlobalArgs {
    /// TOML configuration file; command-line flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Master seed for every stochastic estimator
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for path and quadrature parallelism
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Stderr verbosity: error, warn, info, or debug
    #[arg(long, global = true, value_name = "LEVEL")]
    log_level: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate an eigenpair: radius, eigenfunction, and potential
    Eigenpair(commands::EigenpairArgs),
    /// Pointwise zero-energy residual of an eigenpair over a grid
    Residual(commands::ResidualArgs),
    /// Decay classification of an eigenpair's potential
    Classify(commands::ClassifyArgs),
    /// Scenario and asymptotic-envelope prediction for a process/potential pair
    Predict(commands::PredictArgs),
    /// Monte Carlo estimators for the jump process
    #[command(subcommand)]
    Simulate(commands::SimulateCmd),
    /// Fit a decay-rate model to (r, value) samples
    Fit(commands::FitArgs),
    /// Run a verification suite and report pass/fail per criterion
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fraczero: error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let ctx = config::Context::load(&cli.global)?;
    match cli.command {
        Command::Eigenpair(args) => commands::eigenpair(&ctx, &args),
        Command::Residual(args) => commands::residual(&ctx, &args),
        Command::Classify(args) => commands::classify(&ctx, &args),
        Command::Predict(args) => commands::predict(&ctx, &args),
        Command::Simulate(cmd) => commands::simulate(&ctx, &cmd),
        Command::Fit(args) => commands::fit(&ctx, &args),
        Command::Verify(args) => commands::verify(&ctx, &args),
    }
}
