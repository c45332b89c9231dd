use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Machine-readable record of one command run. Field names are stable.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    /// Command-specific outcome; absent when the command failed.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
    /// Counts of trace events by kind.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub trace_summary: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Run {
    report: RunReport,
    start: Instant,
}

impl Run {
    pub fn new(command: &str) -> Self {
        Run {
            report: RunReport {
                version: pattern_csp::format::VERSION,
                command: command.to_string(),
                inputs: Vec::new(),
                result: Value::Null,
                trace_summary: BTreeMap::new(),
                error: None,
                elapsed_ms: 0.0,
            },
            start: Instant::now(),
        }
    }

    /// Reads a file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String, String> {
        let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        self.report.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn last_digest(&self) -> Option<String> {
        self.report.inputs.last().map(|d| d.sha256.clone())
    }

    pub fn count(&mut self, kind: &str) {
        *self.report.trace_summary.entry(kind.to_string()).or_default() += 1;
    }

    pub fn finish(mut self, result: Result<Value, String>) -> RunReport {
        match result {
            Ok(v) => self.report.result = v,
            Err(e) => self.report.error = Some(e),
        }
        self.report.elapsed_ms = self.start.elapsed().as_secs_f64() * 1000.0;
        self.report
    }
}
