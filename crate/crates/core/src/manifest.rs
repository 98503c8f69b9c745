//! Run manifests: what was run, with which seeds and calibrated constants.
//! The hash covers everything except timing, so equal manifests hash
//! equally across reruns.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::experiments::Calibration;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// SHA-256 of the canonical configuration text.
    pub config_hash: String,
    pub seeds: BTreeMap<String, u64>,
    pub calibration: Option<Calibration>,
    #[serde(default)]
    pub timing_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: &str, canonical_config: &str) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_hash: sha256_hex(canonical_config.as_bytes()),
            seeds: BTreeMap::new(),
            calibration: None,
            timing_seconds: 0.0,
        }
    }

    pub fn hash(&self) -> String {
        let mut copy = self.clone();
        copy.timing_seconds = 0.0;
        sha256_hex(serde_json::to_string(&copy).expect("manifest serializes").as_bytes())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// A report body tagged with the hash of the manifest that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tagged<T> {
    pub manifest_hash: String,
    #[serde(flatten)]
    pub body: T,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_timing() {
        let mut a = RunManifest::new("maximal", "n=64\n");
        a.seeds.insert("corpus".into(), 21);
        let mut b = a.clone();
        b.timing_seconds = 12.5;
        assert_eq!(a.hash(), b.hash());
        b.seeds.insert("corpus".into(), 22);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
