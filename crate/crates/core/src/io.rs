//! CSV/JSON output helpers shared by every module and the CLI.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

/// Version stamped into every JSON manifest.
pub const SCHEMA_VERSION: u32 = 1;

/// Round-trip decimal formatting (17 significant digits).
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a long-format CSV table.
pub fn csv_string<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row.as_ref() {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{}", num(*v));
        }
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Wraps `body` into a manifest carrying the schema version and a SHA-256
/// over the compact serialization of `body`.
pub fn manifest(kind: &str, body: Value) -> Value {
    let hash = sha256_hex(serde_json::to_string(&body).expect("json").as_bytes());
    json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "content_sha256": hash,
        "body": body,
    })
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)
}

pub fn write_json(path: &Path, v: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("json");
    text.push('\n');
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2e-310, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let s = csv_string(&["a", "b"], vec![[1.0, 2.0], [3.0, 4.5]]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "a,b");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2], "3.0000000000000000e0,4.5000000000000000e0");
    }

    #[test]
    fn manifest_hash_is_stable() {
        let a = manifest("x", json!({"k": 1.5, "v": [1, 2]}));
        let b = manifest("x", json!({"k": 1.5, "v": [1, 2]}));
        assert_eq!(a, b);
        assert_eq!(a["schema_version"], SCHEMA_VERSION);
        let c = manifest("x", json!({"k": 1.5000001, "v": [1, 2]}));
        assert_ne!(a["content_sha256"], c["content_sha256"]);
    }
}
