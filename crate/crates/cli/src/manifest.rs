use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Record of one run, written next to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: BTreeMap<String, String>,
    pub options: BTreeMap<String, String>,
    pub output_path: String,
    pub tool_version: String,
    pub config_hash: String,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        params: BTreeMap<String, String>,
        options: BTreeMap<String, String>,
    ) -> Self {
        let tool_version = env!("CARGO_PKG_VERSION").to_string();
        let config_hash = config_hash(subcommand, &params, &options, &tool_version);
        Self {
            subcommand: subcommand.into(),
            params,
            options,
            output_path: String::new(),
            tool_version,
            config_hash,
        }
    }

    /// Path of the manifest that accompanies `output`.
    pub fn path_for(output: &Path) -> std::path::PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        name.into()
    }
}

/// SHA-256 over the canonical JSON of every input that affects results.
pub fn config_hash(
    subcommand: &str,
    params: &BTreeMap<String, String>,
    options: &BTreeMap<String, String>,
    version: &str,
) -> String {
    let canonical = serde_json::json!({
        "subcommand": subcommand,
        "params": params,
        "options": options,
        "tool_version": version,
    });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_inputs() {
        let p: BTreeMap<_, _> = [("a".to_string(), "2/3".to_string())].into();
        let o1: BTreeMap<_, _> = [("seed".to_string(), "1".to_string())].into();
        let o2: BTreeMap<_, _> = [("seed".to_string(), "2".to_string())].into();
        let h1 = RunManifest::new("simulate", p.clone(), o1.clone()).config_hash;
        assert_eq!(h1, RunManifest::new("simulate", p.clone(), o1).config_hash);
        assert_ne!(h1, RunManifest::new("simulate", p, o2).config_hash);
        assert_eq!(h1.len(), 64);
    }
}
