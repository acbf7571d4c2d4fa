//! Run provenance: every emitted output directory carries a manifest with
//! the command, the fully resolved configuration, the seed, and an input
//! fingerprint, so identical manifests (timestamp aside) imply identical
//! results.

use serde::Serialize;

/// Provenance block written as `manifest.json` next to benchmark outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// The invoked command line (or a library-call description).
    pub command: String,
    /// Fully resolved configuration after flag/config/default precedence.
    pub config: serde_json::Value,
    pub seed: u64,
    /// RFC 3339; the only field allowed to differ between identical runs.
    pub timestamp: String,
    pub version: String,
    /// Hash of the input matrix (file bytes or generated data), absent when
    /// the configuration alone determines the input.
    pub input_fingerprint: Option<String>,
}

impl RunManifest {
    pub fn new(
        command: impl Into<String>,
        config: serde_json::Value,
        seed: u64,
        input_fingerprint: Option<String>,
    ) -> Self {
        Self {
            command: command.into(),
            config,
            seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_fingerprint,
        }
    }
}

/// FNV-1a 64-bit over a byte stream, hex-encoded. Stable across platforms;
/// strictly an identity check, not a cryptographic digest.
pub fn fingerprint_bytes(data: &[u8]) -> String {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    format!("{h:016x}")
}

pub fn fingerprint_f64s(data: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(data.len() * 8);
    for x in data {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    fingerprint_bytes(&bytes)
}
