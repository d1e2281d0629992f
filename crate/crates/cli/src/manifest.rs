//! Run manifests: what a command read, what it wrote and with which settings.

use std::path::{Path, PathBuf};

use cognate_core::exec::Execution;
use cognate_core::project::ProjectConfig;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{internal_at, Result};
use crate::io;

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    command: String,
    version: &'static str,
    config: Value,
    execution: &'static str,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    details: Map<String, Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn digest(path: &Path) -> Result<FileDigest> {
    let bytes = std::fs::read(path).map_err(|e| internal_at(path, e))?;
    Ok(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) })
}

impl Manifest {
    pub fn new(command: &str, config: &ProjectConfig, execution: Execution) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(config).expect("config serializes"),
            execution: match execution {
                Execution::Sequential => "sequential",
                Execution::Parallel if Execution::is_parallel_available() => "parallel",
                Execution::Parallel => "sequential (parallel feature disabled)",
            },
            inputs: Vec::new(),
            outputs: Vec::new(),
            details: Map::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(digest(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(digest(path)?);
        Ok(())
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(key.to_string(), serde_json::to_value(value).expect("detail serializes"));
    }

    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        io::write_file(path, text.as_bytes())?;
        Ok(path.to_path_buf())
    }
}
