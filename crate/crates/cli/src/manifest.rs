use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Provenance record written next to every CSV output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub base_seed: u64,
    pub library_version: String,
    pub threads: usize,
    pub started_unix_seconds: u64,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

pub fn digest(path: &Path) -> Result<OutputDigest, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Numeric(format!("cannot read back {}: {e}", path.display())))?;
    let hash = Sha256::digest(&bytes);
    Ok(OutputDigest {
        path: path.display().to_string(),
        sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        bytes: bytes.len() as u64,
    })
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}
