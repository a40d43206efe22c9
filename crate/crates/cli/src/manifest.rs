//! Run manifests: a small JSON record written next to every produced file so
//! a run can be reproduced from its artifacts alone.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub inputs: Vec<String>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, parameters: serde_json::Value) -> RunManifest {
        RunManifest {
            tool: "swaplab",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            inputs: Vec::new(),
            parameters,
            outputs: Vec::new(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    /// Writes `<output>.manifest.json` next to the named output file.
    pub fn write_next_to(&self, output: &Path) -> Result<()> {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path: PathBuf = output.with_file_name(name);
        let body = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&path, body).with_context(|| format!("writing manifest {}", path.display()))
    }
}
