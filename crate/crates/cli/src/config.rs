//! Experiment configuration. Unknown keys are rejected at parse time; the
//! accepted keys mirror `schema/experiment_config.schema.json`.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::ValueEnum;
use paneitz_core::fields::{MIN_AXIAL_SAMPLES, MIN_POINTS_PER_AXIS};
use paneitz_core::{Dimension, GridSpec, MetricModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 1729;
pub const DEFAULT_DIMENSION: i64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Curvature,
    Functional,
    BubbleSweep,
    CutoffSweep,
    ConnectedSum,
    Cylinder,
    Verify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Curvature => "curvature",
            CommandKind::Functional => "functional",
            CommandKind::BubbleSweep => "bubble-sweep",
            CommandKind::CutoffSweep => "cutoff-sweep",
            CommandKind::ConnectedSum => "connected-sum",
            CommandKind::Cylinder => "cylinder",
            CommandKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Sphere,
    Torus,
    Cylinder,
}

/// Cubic periodic grid on the torus [0, side_length)^n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub points_per_axis: usize,
    #[serde(default = "two_pi")]
    pub side_length: f64,
}

fn two_pi() -> f64 {
    2.0 * PI
}

fn default_dimension() -> Dimension {
    Dimension::new(DEFAULT_DIMENSION).expect("default dimension is valid")
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    #[serde(default = "default_dimension")]
    pub dimension: Dimension,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParams>,
    /// ε for bubble-sweep, δ for cutoff-sweep, l for cylinder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Output directory; not echoed into reports.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        ExperimentConfig {
            command,
            dimension: default_dimension(),
            model: None,
            grid: None,
            sweep: None,
            tolerance: None,
            epsilon_budget: None,
            delta: None,
            length: None,
            samples: None,
            seed: DEFAULT_SEED,
            out: None,
        }
    }

    /// Parses and validates a JSON config; parse diagnostics carry line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Config(format!("{field}: {why}")));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if let Some(g) = &self.grid {
            if g.points_per_axis < MIN_POINTS_PER_AXIS {
                return bad(
                    "grid.points_per_axis",
                    &format!("must be at least {MIN_POINTS_PER_AXIS}"),
                );
            }
            if !positive(g.side_length) {
                return bad("grid.side_length", "must be positive and finite");
            }
        }
        if let Some(s) = &self.sweep {
            if s.iter().any(|v| !positive(*v)) {
                return bad("sweep", "entries must be positive and finite");
            }
        }
        for (name, v) in [
            ("tolerance", self.tolerance),
            ("epsilon_budget", self.epsilon_budget),
            ("delta", self.delta),
            ("length", self.length),
        ] {
            if v.is_some_and(|v| !positive(v)) {
                return bad(name, "must be positive and finite");
            }
        }
        if self.samples.is_some_and(|s| s < MIN_AXIAL_SAMPLES) {
            return bad("samples", &format!("must be at least {MIN_AXIAL_SAMPLES}"));
        }
        let allowed: &[ModelKind] = match self.command {
            CommandKind::Curvature | CommandKind::Functional => {
                &[ModelKind::Sphere, ModelKind::Torus, ModelKind::Cylinder]
            }
            CommandKind::BubbleSweep | CommandKind::CutoffSweep | CommandKind::ConnectedSum => {
                &[ModelKind::Torus]
            }
            CommandKind::Cylinder => &[ModelKind::Cylinder],
            CommandKind::Verify => &[],
        };
        if let Some(m) = self.model {
            if !allowed.contains(&m) {
                return bad(
                    "model",
                    &format!("{m:?} is not available for {}", self.command.name()),
                );
            }
        }
        if self.command == CommandKind::Verify && self.dimension.get() != 5 {
            return bad("dimension", "the verify suite is defined for n = 5");
        }
        Ok(())
    }

    pub fn model_or(&self, default: ModelKind) -> ModelKind {
        self.model.unwrap_or(default)
    }

    pub fn side_length(&self) -> f64 {
        self.grid.map_or(2.0 * PI, |g| g.side_length)
    }

    pub fn points_or(&self, default: usize) -> usize {
        self.grid.map_or(default, |g| g.points_per_axis)
    }

    pub fn length_or(&self, default: f64) -> f64 {
        self.length.unwrap_or(default)
    }

    pub fn tolerance_or(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    pub fn sweep_or(&self, default: &[f64]) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn metric_model(&self, kind: ModelKind) -> Result<MetricModel, CliError> {
        let n = self.dimension;
        Ok(match kind {
            ModelKind::Sphere => MetricModel::sphere(n),
            ModelKind::Torus => MetricModel::cubic_torus(n, self.side_length())?,
            ModelKind::Cylinder => MetricModel::cylinder(n, self.length_or(10.0))?,
        })
    }

    pub fn torus_grid(&self, default_points: usize) -> Result<GridSpec, CliError> {
        Ok(GridSpec::cube(
            self.dimension,
            self.points_or(default_points),
            self.side_length(),
        )?)
    }
}
