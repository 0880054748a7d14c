//! Run manifests: what was run, with which parameters, and where the output went.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Command;
use crate::error::{CliError, Result};
use crate::output::to_json_text;

/// Record of one invocation, sufficient to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub wall_time: f64,
}

impl RunManifest {
    pub fn new(command: &Command, seed: u64, workers: usize, outputs: &[PathBuf], wall_time: f64) -> Self {
        let mut parameters = match serde_json::to_value(command) {
            Ok(Value::Object(outer)) => match outer.into_iter().next() {
                Some((_, Value::Object(inner))) => inner.into_iter().collect(),
                _ => BTreeMap::new(),
            },
            _ => BTreeMap::new(),
        };
        parameters.insert("workers".to_string(), Value::from(workers));
        let versions = BTreeMap::from([
            ("circlang".to_string(), circlang::VERSION.to_string()),
            ("circlang-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ]);
        RunManifest {
            command: command.name().to_string(),
            parameters,
            seed,
            versions,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            wall_time,
        }
    }

    /// The recorded command and worker count.
    pub fn command(&self) -> Result<(Command, usize)> {
        let mut params = self.parameters.clone();
        let workers = match params.remove("workers") {
            Some(v) => v.as_u64().ok_or_else(|| CliError::Usage("manifest: `workers` is not an integer".into()))? as usize,
            None => 0,
        };
        let tagged = serde_json::json!({ self.command.clone(): params });
        let command = serde_json::from_value(tagged)
            .map_err(|source| CliError::Json { context: format!("manifest command `{}`", self.command), source })?;
        Ok((command, workers))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("manifests always serialize")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, to_json_text(self.to_json())).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json { context: path.display().to_string(), source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{KernelArgs, Point};

    #[test]
    fn command_round_trips_through_manifest() {
        let cmd = Command::Kernel(KernelArgs { eps: 0.1, w: 1.0, y: 0.08, z: 0.03, start: Some(Point { w: 0.5, y: -1.0, z: 2.0 }) });
        let m = RunManifest::new(&cmd, 42, 3, &[], 0.25);
        let text = to_json_text(m.to_json());
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back.command, "kernel");
        assert_eq!(back.seed, 42);
        assert_eq!(back.command().unwrap(), (cmd, 3));
    }
}
