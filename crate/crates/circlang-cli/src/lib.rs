//! Command-line orchestration for `circlang`: seeded, reproducible runs whose
//! parameters are recorded in a JSON manifest, and CSV/JSON export of sweeps.

// Argument checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use serde_json::json;

use args::{Cli, Command, GlobalOpts};
use commands::Outcome;
use error::{exit, Result};
use manifest::RunManifest;
use output::to_json_text;

/// Manifest location when neither `--manifest` nor `--out` says otherwise.
pub const DEFAULT_MANIFEST: &str = "circlang-manifest.json";

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let Cli { mut global, command } = cli;
    let command = match command {
        Command::Replay(r) => {
            let recorded = RunManifest::read(&r.path)?;
            let (command, workers) = recorded.command()?;
            global.seed = recorded.seed;
            global.workers = workers;
            if global.out.is_none() && matches!(command, Command::Export(_)) {
                global.out = recorded.outputs.first().map(PathBuf::from);
            }
            command
        }
        other => other,
    };
    let started = Instant::now();
    let result = commands::dispatch(&command, &global);
    let outputs = result.as_ref().map(|o| o.outputs.clone()).unwrap_or_default();
    let manifest = RunManifest::new(&command, global.seed, global.workers, &outputs, started.elapsed().as_secs_f64());
    manifest.write(&manifest_path(&command, &global))?;
    let outcome = result?;
    report(&command, &global, &outcome);
    Ok(if outcome.passed { exit::SUCCESS } else { exit::VALIDATION_FAILURE })
}

fn manifest_path(command: &Command, global: &GlobalOpts) -> PathBuf {
    if let Some(p) = &global.manifest {
        return p.clone();
    }
    match (command, &global.out) {
        (Command::Export(e), out) => {
            let mut s = commands::export::output_path(e, out).into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        (_, Some(out)) => out.clone(),
        (_, None) => PathBuf::from(DEFAULT_MANIFEST),
    }
}

fn report(command: &Command, global: &GlobalOpts, outcome: &Outcome) {
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    if global.json {
        let doc = json!({
            "command": command.name(),
            "notes": outcome.notes,
            "passed": outcome.passed,
            "rows": outcome.table.to_json(),
            "seed": global.seed,
        });
        print!("{}", to_json_text(doc));
    } else {
        print!("{}", outcome.table.render());
    }
}
