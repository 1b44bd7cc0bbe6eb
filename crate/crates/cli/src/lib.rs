//! Subcommands of the `anisoheat` binary.

pub mod commands;
pub mod config;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{ExperimentConfig, OutputPaths};

/// Exit status of a subcommand that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

/// Bad flags, an invalid configuration, or a computation that could not
/// be carried out; always exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<anisoheat::Error> for UsageError {
    fn from(e: anisoheat::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<csv::Error> for UsageError {
    fn from(e: csv::Error) -> Self {
        UsageError(e.to_string())
    }
}

pub type CmdResult = Result<Outcome, UsageError>;

pub const USAGE_EXIT: u8 = 2;
pub const THREADS_VAR: &str = "ANISOHEAT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "anisoheat", version, about = "Heat-kernel moment expansions and their decay rates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a heat kernel (and optionally a derivative) to CSV and print its mass and norms.
    Kernel(KernelArgs),
    /// Run a randomized residual suite for one of the decomposition or Taylor identities.
    Verify(VerifyArgs),
    /// Run a rate experiment described by a JSON config file.
    Rates(RatesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Isotropic,
    Mixed,
    Heisenberg,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub t: f64,
    /// Dimension of the isotropic kernel.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Size of the fourth-order block of the mixed kernel.
    #[arg(long)]
    pub m: Option<usize>,
    /// Size of the second-order block, or the rank of ℍⁿ.
    #[arg(long)]
    pub n: Option<usize>,
    /// Nodes per axis (per z-axis on ℍⁿ).
    #[arg(long)]
    pub points: Option<usize>,
    /// Nodes on the θ-axis of ℍⁿ.
    #[arg(long, default_value_t = 64)]
    pub theta_points: usize,
    /// Derivative to sample as well: a multi-index such as `1,0` for the
    /// spectral families, or `z0`, `y1`, `theta`, `zz0,1` on ℍⁿ.
    #[arg(long)]
    pub derivative: Option<String>,
    #[arg(long, default_value = "kernel.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Identity id: 2.1, 2.2, 2.3, 3.3, 4.4, 4.5 or a descriptive name.
    #[arg(long)]
    pub lemma: String,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Second block of the split, or the rank of ℍⁿ.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    pub config: PathBuf,
    /// Overrides the config's JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Overrides the config's CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Reads the thread cap from the environment; unset means rayon's default.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, UsageError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(UsageError(format!("{THREADS_VAR} must be a positive integer, got '{v}'"))),
        },
    }
}

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Kernel(a) => commands::kernel(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Rates(a) => commands::rates(&a),
    }
}
