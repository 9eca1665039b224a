//! Experiment reports, the determinism hash and CSV emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use paneitz_core::constructions::Certificate;
use paneitz_core::fields::format_float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Plot-ready rows; `None` cells are written empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Wall-clock data; excluded from the determinism hash.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sections: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    /// Human-readable lines, also printed by the binary.
    pub summary: Vec<String>,
    pub results: serde_json::Value,
    pub certificates: Vec<Certificate>,
    pub passed: bool,
    /// sha256 over every field above, serialized as JSON.
    pub determinism_hash: String,
    pub timing: Timing,
    #[serde(skip)]
    pub table: Option<Table>,
}

#[derive(Serialize)]
struct Hashed<'a> {
    tool: &'a str,
    version: &'a str,
    config: &'a ExperimentConfig,
    summary: &'a [String],
    results: &'a serde_json::Value,
    certificates: &'a [Certificate],
    passed: bool,
}

impl ExperimentReport {
    pub fn assemble(
        config: ExperimentConfig,
        summary: Vec<String>,
        results: serde_json::Value,
        certificates: Vec<Certificate>,
        table: Option<Table>,
        timing: Timing,
    ) -> Self {
        let passed = certificates.iter().all(|c| c.passed);
        let mut report = ExperimentReport {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            summary,
            results,
            certificates,
            passed,
            determinism_hash: String::new(),
            timing,
            table,
        };
        report.determinism_hash = report.compute_hash();
        report
    }

    pub fn compute_hash(&self) -> String {
        let hashed = Hashed {
            tool: &self.tool,
            version: &self.version,
            config: &self.config,
            summary: &self.summary,
            results: &self.results,
            certificates: &self.certificates,
            passed: self.passed,
        };
        let bytes = serde_json::to_vec(&hashed).expect("report serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Writes the report's table: header row, then one row per sweep point in
/// sweep order. A report without points yields a header-only file.
pub fn emit_csv(report: &ExperimentReport, path: &Path) -> Result<(), CliError> {
    let table = report.table.clone().unwrap_or_default();
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.map_or(String::new(), format_float)))
            .map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CommandKind;

    fn report(table: Option<Table>) -> ExperimentReport {
        ExperimentReport::assemble(
            ExperimentConfig::new(CommandKind::BubbleSweep),
            vec!["x".into()],
            serde_json::json!({"a": 1.5}),
            vec![Certificate::at_most("c", "1 ≤ 2", 1.0, 2.0)],
            table,
            Timing::default(),
        )
    }

    #[test]
    fn hash_ignores_timing() {
        let a = report(None);
        let mut b = report(None);
        b.timing.elapsed_seconds = 99.0;
        assert_eq!(a.determinism_hash, b.compute_hash());
        assert_eq!(a.determinism_hash.len(), 64);
        b.results = serde_json::json!({"a": 1.5000000000000002});
        assert_ne!(a.determinism_hash, b.compute_hash());
    }

    #[test]
    fn csv_round_trips_full_precision() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(&["delta", "quotient"]);
        t.push(vec![Some(0.1), Some(1.0 / 3.0)]);
        t.push(vec![Some(0.05), None]);
        let path = dir.path().join("t.csv");
        emit_csv(&report(Some(t)), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "delta,quotient\n0.1,0.3333333333333333\n0.05,\n");
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        emit_csv(&report(Some(Table::new(&["epsilon", "quotient"]))), &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "epsilon,quotient\n");
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let r = report(Some(Table::new(&["a"])));
        assert!(emit_csv(&r, Path::new("/nonexistent/dir/x.csv")).is_err());
    }
}
