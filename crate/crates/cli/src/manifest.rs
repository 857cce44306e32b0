//! Run manifests and `-`-aware input/output plumbing.
//!
//! Every output document is `{"manifest": ..., "result": ...}`. The manifest
//! records the exact command line, seed, field, tool version, SHA-256
//! digests of every input read, and wall time. Everything except
//! `wall_time_ms` is reproducible byte for byte.

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub inputs: BTreeMap<String, String>,
    pub wall_time_ms: u64,
    #[serde(skip)]
    started: Instant,
}

impl Manifest {
    pub fn new(seed: Option<u64>, field: Option<String>) -> Self {
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        Manifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            field,
            inputs: BTreeMap::new(),
            wall_time_ms: 0,
            started: Instant::now(),
        }
    }

    pub fn record_input(&mut self, name: &str, bytes: &[u8]) {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(name.to_string(), format!("sha256:{hex}"));
    }

    pub fn finish(mut self) -> Value {
        self.wall_time_ms = self.started.elapsed().as_millis() as u64;
        serde_json::to_value(&self).expect("manifest serializes")
    }
}

/// Reads a file, or stdin when the path is `-`, recording its digest.
pub fn read_input(manifest: &mut Manifest, path: &str) -> Result<String> {
    let (name, raw) = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
        ("<stdin>".to_string(), buf)
    } else {
        let buf = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        (path.to_string(), buf)
    };
    manifest.record_input(&name, raw.as_bytes());
    Ok(raw)
}

/// Writes `{"manifest": ..., "result": ...}` to a file or stdout (`-`).
pub fn write_output(path: &str, manifest: Value, result: Value) -> Result<()> {
    let doc = serde_json::json!({
        "manifest": manifest,
        "result": result,
    });
    let body = serde_json::to_string_pretty(&doc).context("serializing output")?;
    if path == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(body.as_bytes())?;
        stdout.write_all(b"\n")?;
    } else {
        std::fs::write(path, body.as_bytes() as &[u8])
            .with_context(|| format!("writing {path}"))?;
        std::fs::OpenOptions::new()
            .append(true)
            .open(path)
            .and_then(|mut f| f.write_all(b"\n"))
            .ok();
    }
    Ok(())
}
