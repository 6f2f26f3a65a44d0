//! Run manifest: enough hashes to reproduce a training run bit-identically
//! and to detect stale models at evaluation time.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub order: usize,
    pub schemes: Vec<String>,
    pub word_initial_marker: String,
    /// Input name -> content hash.
    pub inputs: BTreeMap<String, String>,
    /// Output file name -> content hash.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hex = String::with_capacity(64);
    for byte in Sha256::digest(bytes) {
        write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
    }
    hex
}

pub fn hash_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_NAME);
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(&path, json).with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let bytes = fs::read(&path)
            .with_context(|| format!("reading manifest {}; run `train` first", path.display()))?;
        serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
    }

    /// Checks that an output file still matches its recorded hash.
    pub fn verify_output(&self, dir: &Path, name: &str) -> Result<()> {
        let Some(expected) = self.outputs.get(name) else {
            bail!("manifest does not list output {name:?}");
        };
        let actual = hash_file(dir.join(name))?;
        if actual != *expected {
            bail!(
                "output {name:?} does not match the manifest (expected {expected}, found {actual}); retrain"
            );
        }
        Ok(())
    }
}
