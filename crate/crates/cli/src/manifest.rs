//! Per-stage sidecar manifests recording provenance and file digests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::hex;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Simulate,
    BuildGfs,
    Train,
    Generate,
    Evaluate,
    Report,
}

impl Stage {
    pub fn dir_name(self) -> &'static str {
        match self {
            Stage::Simulate => "simulate",
            Stage::BuildGfs => "gfs",
            Stage::Train => "train",
            Stage::Generate => "generate",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        }
    }

    pub fn dir(self, out: &Path) -> PathBuf {
        out.join(self.dir_name())
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.dir_name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the stage directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: Stage,
    pub seed: u64,
    pub config_hash: String,
    pub files: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

impl Manifest {
    /// Digest every listed file under the stage directory and write the
    /// manifest next to them.
    pub fn write(out: &Path, stage: Stage, seed: u64, config_hash: &str, mut files: Vec<String>) -> Result<Self, CliError> {
        let dir = stage.dir(out);
        files.sort();
        let files = files
            .into_iter()
            .map(|path| {
                let sha256 = sha256_file(&dir.join(&path))?;
                Ok(FileEntry { path, sha256 })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let m = Manifest {
            stage,
            seed,
            config_hash: config_hash.to_string(),
            files,
        };
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Format(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(m)
    }

    /// Load the manifest of an upstream stage; fails with a stage-dependency
    /// error when that stage has not run.
    pub fn require(out: &Path, upstream: Stage, needed_by: Stage) -> Result<Self, CliError> {
        let path = upstream.dir(out).join(MANIFEST_FILE);
        if !path.exists() {
            return Err(CliError::MissingUpstream { stage: needed_by, upstream });
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| CliError::Format(e.to_string()))?;
        if m.stage != upstream {
            return Err(CliError::Format(format!("{} holds a {} manifest", path.display(), m.stage)));
        }
        Ok(m)
    }

    /// Re-hash every listed file and compare with the recorded digest.
    pub fn verify(&self, out: &Path) -> Result<(), CliError> {
        let dir = self.stage.dir(out);
        for f in &self.files {
            if sha256_file(&dir.join(&f.path))? != f.sha256 {
                return Err(CliError::Format(format!("{}/{} changed since it was written", self.stage, f.path)));
            }
        }
        Ok(())
    }
}
