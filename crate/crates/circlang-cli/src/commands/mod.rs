//! Subcommand implementations.

pub mod constants;
pub mod export;
pub mod kernel;
pub mod validate;

use std::path::PathBuf;

use crate::args::{Command, GlobalOpts};
use crate::error::{CliError, Result};
use crate::output::Table;

/// Result of a subcommand.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub table: Table,
    /// `false` turns into exit code 1.
    pub passed: bool,
    /// Warnings and remarks, printed to stderr.
    pub notes: Vec<String>,
    /// Files written besides the manifest.
    pub outputs: Vec<PathBuf>,
}

pub fn dispatch(command: &Command, global: &GlobalOpts) -> Result<Outcome> {
    match command {
        Command::Constants(a) => constants::run(a),
        Command::Kernel(a) => kernel::run(a),
        Command::Validate(a) => validate::run(a, global),
        Command::Export(a) => export::run(a, global),
        Command::Replay(_) => Err(CliError::Usage("a manifest cannot record another replay".into())),
    }
}
