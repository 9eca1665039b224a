//! Batch front end for `paneitz-core`: a JSON-configured experiment runner
//! that writes a JSON report and plot-ready CSV, and gates its exit status
//! on the certificates each experiment checks.
//!
//! Exit status: 0 when every certificate passes, 1 when one fails, 2 on a
//! configuration or I/O error.

pub mod config;
pub mod experiments;
pub mod report;
pub mod samples;
pub mod verify;

use std::time::Instant;

use serde_json::json;

pub use config::{CommandKind, ExperimentConfig, GridParams, ModelKind, DEFAULT_SEED};
pub use report::{emit_csv, ExperimentReport, Table, Timing};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] paneitz_core::Error),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Validates `config`, dispatches to its command and assembles the report.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    config.validate()?;
    let start = Instant::now();
    let mut timing = Timing::default();
    let outcome = match config.command {
        CommandKind::Curvature => experiments::curvature_report(config)?,
        CommandKind::Functional => experiments::functional_report(config)?,
        CommandKind::BubbleSweep => experiments::bubble_report(config)?,
        CommandKind::CutoffSweep => experiments::cutoff_report(config)?,
        CommandKind::ConnectedSum => experiments::connected_sum_report(config)?,
        CommandKind::Cylinder => experiments::cylinder_report(config)?,
        CommandKind::Verify => {
            let (criteria, sections) = verify::run_suite(config.seed)?;
            timing.sections.extend(sections);
            let summary = criteria
                .iter()
                .map(|c| {
                    let verdict = if c.passed { "PASS" } else { "FAIL" };
                    format!("criterion {} {verdict}: {}", c.id, c.title)
                })
                .collect();
            let certificates = criteria
                .iter()
                .flat_map(|c| {
                    c.certificates.iter().cloned().map(move |mut cert| {
                        cert.name = format!("c{}.{}", c.id, cert.name);
                        cert
                    })
                })
                .collect();
            experiments::Outcome {
                summary,
                results: json!({"criteria": criteria}),
                certificates,
                table: None,
            }
        }
    };
    timing.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(ExperimentReport::assemble(
        config.clone(),
        outcome.summary,
        outcome.results,
        outcome.certificates,
        outcome.table,
        timing,
    ))
}
