//! Input digests, stage fingerprints, and the stage cache.
//!
//! Every stage is keyed by a fingerprint: a SHA-256 over the stage name,
//! the config settings it reads, the content digests of its input files,
//! and the fingerprints of the stages it consumes. A stage whose recorded
//! fingerprint matches and whose output files still exist is skipped.
//! Caching is purely an optimisation — outputs are written
//! deterministically, so cached and cold runs produce identical bytes.

use crate::error::{CliError, Result};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Environment variable that relocates the stage cache.
pub const CACHE_ENV: &str = "REVIEW_MINER_CACHE";

/// SHA-256 of a file's contents, lowercase hex.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| {
        CliError::Config(format!("cannot read input {}: {e}", path.display()))
    })?;
    let mut hasher = Sha256::new();
    let mut buffer = [0u8; 64 * 1024];
    loop {
        let n = file
            .read(&mut buffer)
            .map_err(|e| CliError::output(path.display().to_string(), e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buffer[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Combines labelled parts into one fingerprint. Parts are length-prefixed
/// so no concatenation of values can collide with another split.
pub fn fingerprint(parts: &[(&str, &str)]) -> String {
    let mut hasher = Sha256::new();
    for (label, value) in parts {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        hasher.update((value.len() as u64).to_le_bytes());
        hasher.update(value.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// On-disk cache of stage fingerprints.
#[derive(Debug, Clone)]
pub struct StageCache {
    dir: PathBuf,
}

impl StageCache {
    /// Cache lives under `<output_dir>/cache` unless `env_override`
    /// (normally the value of [`CACHE_ENV`]) points elsewhere.
    pub fn resolve(output_dir: &Path, env_override: Option<PathBuf>) -> StageCache {
        StageCache {
            dir: env_override.unwrap_or_else(|| output_dir.join("cache")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// True when `stage` recorded exactly this fingerprint and all its
    /// output files still exist.
    pub fn is_fresh(&self, stage: &str, fingerprint: &str, outputs: &[PathBuf]) -> bool {
        let recorded = match fs::read_to_string(self.marker(stage)) {
            Ok(text) => text,
            Err(_) => return false,
        };
        recorded.trim() == fingerprint && outputs.iter().all(|p| p.exists())
    }

    /// Records a fingerprint. Called only after the stage's outputs are
    /// fully written, so a crash can leave outputs without a marker but
    /// never a marker without outputs.
    pub fn record(&self, stage: &str, fingerprint: &str) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::output(self.dir.display().to_string(), e))?;
        let path = self.marker(stage);
        let mut file = fs::File::create(&path)
            .map_err(|e| CliError::output(path.display().to_string(), e))?;
        writeln!(file, "{fingerprint}")
            .map_err(|e| CliError::output(path.display().to_string(), e))
    }

    fn marker(&self, stage: &str) -> PathBuf {
        self.dir.join(format!("{stage}.fp"))
    }
}

/// One input file recorded in the run manifest: a config-key label, the
/// file's base name, and its content digest. Directory components are
/// dropped so relocating a corpus does not change the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestInput {
    pub label: String,
    pub file_name: String,
    pub digest: String,
}

impl ManifestInput {
    pub fn for_file(label: &str, path: &Path) -> Result<ManifestInput> {
        Ok(ManifestInput {
            label: label.to_string(),
            file_name: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            digest: file_digest(path)?,
        })
    }
}

/// Renders the run manifest: sorted settings first, then inputs in label
/// order. Settings must already exclude machine-local values (paths,
/// output directory) so identical runs on relocated trees stay
/// byte-identical.
pub fn render_manifest(
    settings: &BTreeMap<String, String>,
    inputs: &[ManifestInput],
) -> String {
    let mut out = String::new();
    for (key, value) in settings {
        out.push_str(&format!("setting\t{key}\t{value}\n"));
    }
    let mut sorted: Vec<&ManifestInput> = inputs.iter().collect();
    sorted.sort_by(|a, b| a.label.cmp(&b.label));
    for input in sorted {
        out.push_str(&format!(
            "input\t{}\t{}\t{}\n",
            input.label, input.file_name, input.digest
        ));
    }
    out
}
