use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Provenance of one output CSV, written next to it as `<file>.manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub library_version: String,
    /// File name to hex SHA-256.
    pub outputs: BTreeMap<String, String>,
}

/// What every manifest of one invocation shares.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub started_at: DateTime<Utc>,
}

impl RunContext {
    pub fn new(command_line: Vec<String>, config: impl Serialize, seed: u64) -> Result<Self> {
        Ok(Self {
            command_line,
            config: serde_json::to_value(config)?,
            seed,
            started_at: Utc::now(),
        })
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    csv.with_file_name(name)
}

/// Hashes `csv` and writes its manifest.
pub fn write_manifest(csv: &Path, ctx: &RunContext) -> Result<RunManifest> {
    let name = csv
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let manifest = RunManifest {
        command_line: ctx.command_line.clone(),
        config: ctx.config.clone(),
        seed: ctx.seed,
        started_at: ctx.started_at,
        finished_at: Utc::now(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: BTreeMap::from([(name, sha256_file(csv)?)]),
    };
    std::fs::write(manifest_path(csv), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_matches_file() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("out.csv");
        std::fs::write(&csv, "a,b\n1,2\n").unwrap();
        let ctx = RunContext::new(vec!["njee".into(), "entropy".into()], serde_json::json!({"n": 3}), 7).unwrap();
        let m = write_manifest(&csv, &ctx).unwrap();
        let back = read_manifest(&manifest_path(&csv)).unwrap();
        assert_eq!(m, back);
        assert_eq!(back.outputs["out.csv"], sha256_file(&csv).unwrap());
        // sha256 of the empty string
        std::fs::write(&csv, "").unwrap();
        assert_eq!(
            sha256_file(&csv).unwrap(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
