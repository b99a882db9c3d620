//! Run manifests: enough to reproduce a run and check its output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::output::to_json_bytes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub started_at: String,
    pub format: String,
    /// SHA-256 of the result payload in each encoding.
    pub checksums: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Checksums of a result in both encodings.
pub fn checksums(result: &Value, csv: &[u8]) -> serde_json::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    out.insert(
        "result_json".to_string(),
        sha256_hex(&to_json_bytes(result)?),
    );
    out.insert("result_csv".to_string(), sha256_hex(csv));
    Ok(out)
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
