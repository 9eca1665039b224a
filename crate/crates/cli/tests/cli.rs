use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use paneitz_cli::{CommandKind, ExperimentConfig, GridParams, ModelKind};

fn paneitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paneitz"))
        .args(args)
        .env_remove("PANEITZ_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn curvature_of_the_five_sphere() {
    let o = paneitz(&["curvature", "--model", "sphere", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("R = 20\n"), "{s}");
    assert!(s.contains("Ric eigenvalue = 4\n"), "{s}");
    assert!(s.contains("Q = 6.5625\n"), "{s}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"command\": \"curvature\",").unwrap();
    let o = paneitz(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    fs::write(&bad, "{\"command\": \"curvature\", \"grdi\": 3}").unwrap();
    let o = paneitz(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grdi"));

    assert_eq!(paneitz(&["curvature", "--n", "4"]).status.code(), Some(2));
    assert_eq!(paneitz(&["run"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_paneitz"))
        .args(["curvature"])
        .env("PANEITZ_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mismatched_subcommand_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"command": "cylinder"}"#).unwrap();
    let o = paneitz(&["curvature", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bubble_sweep_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bubble");
    let o = paneitz(&["bubble-sweep", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = fs::read_to_string(out.join("bubble-sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("epsilon,numerator,mass,quotient,oracle,rel_err")
    );
    assert_eq!(lines.count(), 5);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["timing"]["elapsed_seconds"].is_number());
}

#[test]
fn empty_sweep_is_header_only_and_fails_its_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    let out = dir.path().join("o");
    fs::write(
        &cfg,
        format!(
            r#"{{"command": "bubble-sweep", "sweep": [], "out": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = paneitz(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        fs::read_to_string(out.join("bubble-sweep.csv")).unwrap(),
        "epsilon,numerator,mass,quotient,oracle,rel_err\n"
    );
}

#[test]
fn failing_certificate_exits_with_one() {
    let o = paneitz(&["bubble-sweep", "--tolerance", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL oracle_distance"));
}

#[test]
fn seeded_runs_are_reproducible() {
    let hash = |seed: &str| {
        let o = paneitz(&["functional", "--seed", seed, "--json"]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["determinism_hash"].as_str().unwrap().to_owned()
    };
    assert_eq!(hash("11"), hash("11"));
    assert_ne!(hash("11"), hash("12"));
}

#[test]
fn cylinder_command_passes() {
    let o = paneitz(&["cylinder", "--n", "6", "--length", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn schema_lists_exactly_the_config_keys() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/experiment_config.schema.json");
    let schema: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let mut documented: Vec<String> = schema["properties"]
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    documented.sort();
    let mut full = ExperimentConfig::new(CommandKind::Functional);
    full.model = Some(ModelKind::Torus);
    full.grid = Some(GridParams {
        points_per_axis: 8,
        side_length: 1.0,
    });
    full.sweep = Some(vec![]);
    full.tolerance = Some(1.0);
    full.epsilon_budget = Some(1.0);
    full.delta = Some(1.0);
    full.length = Some(1.0);
    full.samples = Some(5);
    let mut keys: Vec<String> = serde_json::to_value(&full)
        .unwrap()
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    keys.push("out".into());
    keys.sort();
    assert_eq!(documented, keys);
    let commands: Vec<&str> = schema["properties"]["command"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    for c in &commands {
        let parsed: CommandKind = serde_json::from_value(serde_json::json!(c)).unwrap();
        assert_eq!(parsed.name(), *c);
    }
    assert_eq!(commands.len(), 7);
}

#[test]
fn sample_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        ExperimentConfig::from_json(&text).unwrap();
        count += 1;
    }
    assert!(count >= 5);
}
