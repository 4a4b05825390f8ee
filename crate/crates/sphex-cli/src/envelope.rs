//! Result envelope: every command writes a JSON document that embeds the
//! schema version, the fully resolved configuration, the results and a
//! provenance block. The provenance block carries a digest of the canonical
//! payload, the envelope with its wall-clock fields removed, so two runs
//! with the same seed can be compared by digest alone.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Fields stripped before hashing (and the digest itself).
const VOLATILE: [&str; 2] = ["timestamp_unix", "payload_digest"];

pub struct Envelope {
    pub command: &'static str,
    pub config: Value,
    pub results: Value,
    pub diagnostics: Vec<String>,
    pub seed: Option<u64>,
}

impl Envelope {
    pub fn render(&self) -> Value {
        let mut doc = json!({
            "version": SCHEMA_VERSION,
            "tool": "sphex",
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "diagnostics": self.diagnostics,
            "provenance": {
                "seed": self.seed,
                "timestamp_unix": unix_now(),
            },
        });
        let digest = canonical_digest(&doc);
        doc["provenance"]["payload_digest"] = Value::String(digest);
        doc
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// SHA-256 of the canonical payload: the document minus volatile provenance
/// fields, serialized with serde_json's sorted object keys.
pub fn canonical_digest(doc: &Value) -> String {
    let mut canonical = doc.clone();
    if let Some(prov) = canonical.get_mut("provenance").and_then(Value::as_object_mut) {
        for key in VOLATILE {
            prov.remove(key);
        }
    }
    let bytes = serde_json::to_vec(&canonical).expect("serializable");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(7 + 64);
    out.push_str("sha256:");
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Writes the document to `--out` or stdout.
pub fn emit(doc: &Value, out: Option<&str>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::input(format!("cannot write {path}: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Writes CSV rows (already formatted) with a header to `path` or stdout.
pub fn emit_csv(header: &str, rows: &[String], out: Option<&str>) -> Result<(), CliError> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
