//! Run manifests: what was run, on which inputs, producing which outputs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Command-line arguments after the program name, as given.
    pub args: Vec<String>,
    /// Fully resolved configuration.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
    /// Wall-clock milliseconds; only with `--record-timing`, since it breaks
    /// byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

pub fn digest(path: &Path, label: &str) -> std::io::Result<FileDigest> {
    Ok(FileDigest { path: label.to_string(), sha256: sha256_file(path)? })
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_known_bytes() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("abc");
        fs::write(&p, b"abc").unwrap();
        assert_eq!(
            sha256_file(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let m = RunManifest {
            tool: "twoview".into(),
            version: "0.1.0".into(),
            command: "generate".into(),
            args: vec!["generate".into(), "--n".into(), "10".into()],
            config: serde_json::json!({"n": 10}),
            seed: Some(3),
            inputs: vec![],
            outputs: vec![FileDigest { path: "train_x.csv".into(), sha256: "00".into() }],
            timing_ms: None,
        };
        let text = serde_json::to_string(&m).unwrap();
        assert!(!text.contains("timing_ms"));
        assert_eq!(serde_json::from_str::<RunManifest>(&text).unwrap(), m);
    }
}
