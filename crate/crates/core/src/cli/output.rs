use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "dimerqd";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column-oriented table with string cells, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Hash comment line followed by the CSV body, LF line endings.
    pub fn to_bytes(&self, run_hash: &str) -> Result<Vec<u8>> {
        let mut buf = format!("# run sha256:{run_hash}\n").into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            let to_err = |e: csv::Error| Error::Config(format!("cannot encode CSV: {e}"));
            w.write_record(&self.header).map_err(to_err)?;
            for r in &self.rows {
                w.write_record(r).map_err(to_err)?;
            }
            w.flush().map_err(|e| Error::Config(format!("cannot encode CSV: {e}")))?;
        }
        Ok(buf)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Serialize)]
struct Identity<'a> {
    tool: &'a str,
    version: &'a str,
    config: &'a RunConfig,
}

/// SHA-256 over the canonical JSON of tool name, version and resolved
/// config. Output location and timing do not enter.
pub fn run_hash(config: &RunConfig) -> String {
    let id = Identity {
        tool: TOOL_NAME,
        version: env!("CARGO_PKG_VERSION"),
        config,
    };
    let json = serde_json::to_vec(&id).expect("config serializes to JSON");
    sha256_hex(&json)
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub run_hash: String,
    pub command: String,
    pub config: serde_json::Value,
    /// Explicit config text that reproduces this run.
    pub config_text: String,
    pub wall_time_s: f64,
    pub diagnostics: serde_json::Value,
    pub outputs: Vec<FileRecord>,
}
