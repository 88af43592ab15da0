//! Run manifest: what ran, on what input, producing which artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Written next to every command's artifacts; all referenced paths exist on
/// successful exit.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Echo of the fully resolved configuration.
    pub config: serde_json::Value,
    /// FNV-1a hash of the input bytes, as fixed-width hex.
    pub input_fingerprint: String,
    /// Artifact name -> path, relative to the output directory.
    pub artifacts: BTreeMap<String, String>,
    pub wall_clock_ms: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, fingerprint: u64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            input_fingerprint: format!("{fingerprint:016x}"),
            artifacts: BTreeMap::new(),
            wall_clock_ms: 0,
        }
    }

    pub fn add_artifact(&mut self, name: &str, path: &Path) {
        self.artifacts
            .insert(name.to_string(), path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::runtime(format!("manifest serialization: {e}")))?;
        fs::write(path, json)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
    }
}
