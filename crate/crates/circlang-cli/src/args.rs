//! Command-line surface.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Small-time heat-kernel asymptotics of the circular Langevin diffusion.
#[derive(Parser, Debug, Clone)]
#[command(name = "circlang", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct GlobalOpts {
    /// Print a machine-readable JSON report instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Output file: the table for `export`, the run manifest otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Where to write the run manifest (overrides the default location).
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    /// Seed of the Monte-Carlo streams.
    #[arg(long, global = true, env = "CIRCLANG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for Monte-Carlo work (0 = all cores); never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Oscillatory constants, the first root of tan θ = θ and diagnostics.
    Constants(ConstantsArgs),
    /// Log-density equivalent at a target point.
    Kernel(KernelArgs),
    /// Run a validation suite and report one line per check.
    Validate(ValidateArgs),
    /// Write a sweep table as CSV or JSON.
    Export(ExportArgs),
    /// Re-run the command recorded in a run manifest.
    Replay(ReplayArgs),
}

impl Command {
    /// Name recorded in manifests.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Kernel(_) => "kernel",
            Command::Validate(_) => "validate",
            Command::Export(_) => "export",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstantsArgs {
    /// Absolute tolerance for σ and σ′.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelArgs {
    /// Time horizon ε > 0.
    #[arg(long)]
    pub eps: f64,
    /// Target angle.
    #[arg(long, allow_hyphen_values = true)]
    pub w: f64,
    /// Target first position coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
    /// Target second position coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
    /// Starting point `w0,y0,z0` (default: the origin).
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<Point>,
}

/// Which checks `validate` runs.
#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Deterministic checks (identities, constants, quadrature).
    Fast,
    /// Monte-Carlo checks.
    Mc,
    /// Every check.
    Full,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ValidateArgs {
    #[arg(value_enum, default_value_t = Suite::Fast)]
    pub suite: Suite,
    /// Monte-Carlo paths per estimate.
    #[arg(long, default_value_t = 200_000)]
    pub paths: usize,
    /// Bridge discretisation steps.
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

/// Sweep tables available to `export`.
#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Table {
    /// Log-density equivalent against ε at a fixed rescaled target.
    Kernel,
    /// Modulus and continuous argument of Φ(χ, x) against x.
    Phi,
    /// Distribution function of the bridge's absolute maximum.
    Wstar,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExportArgs {
    #[arg(value_enum)]
    pub table: Table,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// First grid value (ε for `kernel`, x for `phi`, y for `wstar`).
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Last grid value.
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Target angle for the `kernel` table.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub w: f64,
    /// Rescaled target y/ε for the `kernel` table.
    #[arg(long, default_value_t = 0.8, allow_hyphen_values = true)]
    pub y: f64,
    /// Rescaled target z/ε for the `kernel` table.
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub z: f64,
    /// χ for the `phi` table.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub chi: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub path: PathBuf,
}

/// A point `w,y,z` given on the command line.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Point {
    pub w: f64,
    pub y: f64,
    pub z: f64,
}

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated numbers w0,y0,z0, got `{s}`"));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|e| format!("`{p}`: {e}"))?;
        }
        Ok(Point { w: v[0], y: v[1], z: v[2] })
    }
}
