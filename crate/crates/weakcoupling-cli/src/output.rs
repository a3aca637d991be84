//! Artifacts carry the config hash: JSON files as a top-level field, CSV files as a leading comment.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub struct Artifacts {
    dir: PathBuf,
    hash: String,
    written: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path, hash: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), hash: hash.to_string(), written: vec![] })
    }

    fn write(&mut self, name: &str, body: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn csv(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let text = format!("# config_hash={}\n{body}", self.hash);
        self.write(name, text.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<(), CliError> {
        let v = json!({ "config_hash": self.hash, "data": data });
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn names(&self) -> &[String] {
        &self.written
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Run record; the only file whose content depends on the thread count and wall time.
pub fn write_manifest(dir: &Path, manifest: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text).map_err(|e| CliError::Io(format!("manifest: {e}")))
}
