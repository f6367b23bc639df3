//! Run manifests.
//!
//! Every command writes exactly one manifest recording the resolved
//! configuration, the seeds, content hashes of every input, and the
//! names of every output, so a run can be audited or replayed from the
//! manifest alone. Wall-clock time is opt-in: without `--timestamps`
//! the manifest (like every other output) is byte-identical across
//! reruns.

use crate::error::Result;
use crate::util::{sha256_file, write_file};
use serde::Serialize;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub seeds: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub details: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unix_time_ms: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            config: serde_json::Value::Null,
            seeds: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: serde_json::Value::Null,
            unix_time_ms: None,
        }
    }

    /// Hashes and records one input file by its file name.
    ///
    /// Only the final path component is kept: content identity lives in the
    /// hash, and recording the location would make otherwise identical runs
    /// differ when their inputs are staged in different directories.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        let name = match path.file_name() {
            Some(n) => n.to_string_lossy().into_owned(),
            None => path.display().to_string(),
        };
        self.inputs.push(InputDigest {
            name,
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    /// Records one output by the name it has inside the run's output
    /// directory.
    pub fn output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    pub fn stamp(&mut self) {
        let ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        self.unix_time_ms = Some(ms);
    }

    /// Sorts the output list, adds the manifest itself to it, and
    /// writes pretty JSON.
    pub fn write(mut self, path: &Path) -> Result<()> {
        if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
            self.outputs.push(name.to_string());
        }
        self.outputs.sort();
        self.outputs.dedup();
        let mut text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        text.push('\n');
        write_file(path, text.as_bytes())
    }
}
