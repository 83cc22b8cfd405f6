//! Run manifests: every command records what it read (with content
//! digests), what it wrote, and the effective configuration, so a run can
//! be audited and reruns compared. Two runs over identical inputs with the
//! same seed produce identical manifests except for `created_unix`.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Effective settings after flags and overrides were applied.
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    /// Paths this run wrote, relative to the output directory.
    pub outputs: Vec<String>,
    /// Unix seconds; the only field allowed to differ between reruns.
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn record_output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    /// Writes the manifest itself (always named `manifest.json`) last, so
    /// its own entry is in the output list.
    pub fn write(mut self, dir: &Path) -> Result<PathBuf> {
        self.record_output("manifest.json");
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self)
            .map_err(|e| Error::Data(format!("serializing manifest: {e}")))?;
        std::fs::write(&path, text)
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
        Ok(path)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::io(format!("digesting {}", path.display()), e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Creates `dir` (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::io(format!("creating directory {}", dir.display()), e))
}

/// Writes `text` under `dir` and records the file in the manifest.
pub fn write_artifact(
    manifest: &mut RunManifest,
    dir: &Path,
    name: &str,
    text: &str,
) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text)
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    manifest.record_output(name);
    Ok(())
}
