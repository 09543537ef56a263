//! Deterministic artifact writers: CSV (17 significant digits, LF), JSON
//! mirrors with a schema version, and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, OutputFormat};

pub const SCHEMA_VERSION: u32 = 1;

/// 17-significant-digit scientific formatting; round-trips any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

/// One output table, written as CSV or a JSON mirror.
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(r.iter())
                    .map(|(c, v)| (c.clone(), serde_json::Value::String(v.clone())))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "columns": self.columns,
            "rows": rows,
        })
    }

    /// Writes the table in the requested format; returns the file path.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<PathBuf> {
        let (ext, contents) = match format {
            OutputFormat::Csv => ("csv", self.to_csv()),
            OutputFormat::Json => (
                "json",
                serde_json::to_string_pretty(&self.to_json())? + "\n",
            ),
        };
        let path = dir.join(format!("{}.{ext}", self.name));
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Wall-clock bookkeeping per stage plus the config hash.
pub struct Manifest {
    config_hash: String,
    stages: Vec<(String, u128)>,
    files: Vec<String>,
    started: Instant,
    current: Option<(String, Instant)>,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        let canonical = serde_json::to_string(&config.canonical_json()).unwrap();
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        Self {
            config_hash: format!("{:x}", hasher.finalize()),
            stages: Vec::new(),
            files: Vec::new(),
            started: Instant::now(),
            current: None,
        }
    }

    pub fn begin_stage(&mut self, name: &str) {
        self.end_stage();
        self.current = Some((name.to_string(), Instant::now()));
    }

    pub fn end_stage(&mut self) {
        if let Some((name, t0)) = self.current.take() {
            self.stages.push((name, t0.elapsed().as_millis()));
        }
    }

    pub fn record_file(&mut self, path: &Path) {
        if let Some(name) = path.file_name() {
            self.files.push(name.to_string_lossy().into_owned());
        }
    }

    pub fn write(mut self, dir: &Path) -> Result<PathBuf> {
        self.end_stage();
        let value = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "config_hash": self.config_hash,
            "versions": {
                "nhm-core": nhm_core_version(),
                "nhm-harness": env!("CARGO_PKG_VERSION"),
            },
            "stages": self.stages.iter().map(|(n, ms)| serde_json::json!({
                "name": n, "wall_ms": ms,
            })).collect::<Vec<_>>(),
            "total_wall_ms": self.started.elapsed().as_millis(),
            "files": self.files,
        });
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn nhm_core_version() -> &'static str {
    // workspace-versioned together
    env!("CARGO_PKG_VERSION")
}
