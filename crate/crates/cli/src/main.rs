use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paneitz_cli::{emit_csv, run, CliError, CommandKind, ExperimentConfig, GridParams, ModelKind};
use paneitz_core::Dimension;

#[derive(Parser)]
#[command(name = "paneitz", version, about = "Paneitz functional experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON experiment config; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, visible_alias = "n", global = true)]
    dimension: Option<i64>,
    /// Points per axis of the periodic torus grid.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Directory for report.json and the sweep CSV.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, global = true)]
    model: Option<ModelKind>,
    /// Cylinder length l.
    #[arg(long, global = true)]
    length: Option<f64>,
    /// Comma-separated sweep values (ε, δ or l).
    #[arg(long, value_delimiter = ',', global = true)]
    sweep: Option<Vec<f64>>,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Closed-form curvature data and Q of a model.
    Curvature,
    /// ℘(u) for a seeded random test function.
    Functional,
    /// Bubble quotients on the flat torus against the sphere oracle.
    BubbleSweep,
    /// Cutoff family convergence ℘(f_δ u) → ℘(u).
    CutoffSweep,
    /// Two-torus connected-sum certificates.
    ConnectedSum,
    /// Cylinder positivity, slices and collar extension.
    Cylinder,
    /// The full acceptance suite.
    Verify,
    /// Run the command named in --config.
    Run,
}

fn command_kind(c: Cmd) -> Option<CommandKind> {
    Some(match c {
        Cmd::Curvature => CommandKind::Curvature,
        Cmd::Functional => CommandKind::Functional,
        Cmd::BubbleSweep => CommandKind::BubbleSweep,
        Cmd::CutoffSweep => CommandKind::CutoffSweep,
        Cmd::ConnectedSum => CommandKind::ConnectedSum,
        Cmd::Cylinder => CommandKind::Cylinder,
        Cmd::Verify => CommandKind::Verify,
        Cmd::Run => return None,
    })
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match (&cli.config, command_kind(cli.command)) {
        (Some(path), kind) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let c = ExperimentConfig::from_json(&text).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
                other => other,
            })?;
            if kind.is_some_and(|k| k != c.command) {
                return Err(CliError::Config(format!(
                    "config command {} does not match the subcommand",
                    c.command.name()
                )));
            }
            c
        }
        (None, Some(kind)) => ExperimentConfig::new(kind),
        (None, None) => return Err(CliError::Config("run needs --config".into())),
    };
    if let Some(n) = cli.dimension {
        config.dimension = Dimension::new(n).map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Some(k) = cli.grid_points {
        let side = config.side_length();
        config.grid = Some(GridParams {
            points_per_axis: k,
            side_length: side,
        });
    }
    if cli.out.is_some() {
        config.out.clone_from(&cli.out);
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if cli.tolerance.is_some() {
        config.tolerance = cli.tolerance;
    }
    if cli.model.is_some() {
        config.model = cli.model;
    }
    if cli.length.is_some() {
        config.length = cli.length;
    }
    if cli.sweep.is_some() {
        config.sweep.clone_from(&cli.sweep);
    }
    config.validate()?;
    Ok(config)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PANEITZ_THREADS") else {
        return Ok(());
    };
    let threads: usize = v.parse().ok().filter(|t| *t > 0).ok_or_else(|| {
        CliError::Config(format!("PANEITZ_THREADS={v} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let config = build_config(cli)?;
    let report = run(&config)?;
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        report.write_json(&dir.join("report.json"))?;
        if report.table.is_some() {
            emit_csv(&report, &dir.join(format!("{}.csv", config.command.name())))?;
        }
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!("seed = {}", config.seed);
        for line in &report.summary {
            println!("{line}");
        }
        for c in &report.certificates {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            println!(
                "{verdict} {}: {} (lhs {}, rhs {})",
                c.name, c.inequality, c.lhs, c.rhs
            );
        }
        println!("determinism hash = {}", report.determinism_hash);
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("paneitz: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
