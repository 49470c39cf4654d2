use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rsd-market"));
    cmd.env_remove("RSD_MARKET_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn serial_dictatorship_on_the_two_agent_swap() {
    let doc = json(&run(&[
        "mech", "run", "--mechanism", "sd", "--scenario", "two-agent-swap", "--order", "0,1",
    ]));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["outcome"]["utilities"], serde_json::json!([7.0, 6.0]));
}

#[test]
fn ce_mechanism_reports_prices() {
    let doc = json(&run(&[
        "mech", "run", "--mechanism", "ce", "--scenario", "two-agent-swap", "--order", "0,1",
    ]));
    assert_eq!(doc["outcome"]["allocation"], serde_json::json!([1, 0]));
    assert_eq!(doc["outcome"]["welfare"], 11.0);
    assert_eq!(doc["prices"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn oracle_reports_the_optimum() {
    let doc = json(&run(&["oracle", "check", "--scenario", "interim-shortfall"]));
    assert_eq!(doc["optimum_welfare"], 22.0);
    assert_eq!(doc["assignment_welfare"], 22.0);
}

#[test]
fn interim_latecomer_trades_once() {
    let doc = json(&run(&[
        "mech", "run", "--mechanism", "interim", "--scenario", "interim-latecomer",
        "--order", "0,1,2,3",
    ]));
    assert_eq!(doc["outcome"]["welfare"], 120.0);
    assert_eq!(doc["outcome"]["trades"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = run(&["mech", "run", "--mechanism", "sd", "--scenario", "missing"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["mech", "run", "--mechanism", "sd", "--scenario", "two-agent-swap", "--order", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_3() {
    let out = run(&["two-agent", "solve", "--v-want", "0.2", "--v-hold", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    let rows = vec![vec![1.0; 13]; 13];
    std::fs::write(
        &big,
        serde_json::json!({"n_agents": 13, "n_items": 13, "valuations": rows, "budgets": vec![0.0; 13]})
            .to_string(),
    )
    .unwrap();
    let out = run(&["oracle", "check", "--instance", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn two_agent_solver_matches_the_uniform_case() {
    let doc = json(&run(&["two-agent", "solve", "--v-want", "0.8", "--v-hold", "0.1"]));
    let t = doc["offer"]["offer"].as_f64().unwrap();
    // Maximises (0.7 − t)(1 − (1 − t)²/2) on [0, 1].
    let pi = |t: f64| (0.7 - t) * (1.0 - (1.0 - t).powi(2) / 2.0);
    let best = (0..=100_000)
        .map(|k| k as f64 / 100_000.0)
        .max_by(|a, b| pi(*a).total_cmp(&pi(*b)))
        .unwrap();
    assert!((t - best).abs() < 1e-4, "{t} vs {best}");
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn housing_outputs_are_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = bin()
            .env("RSD_MARKET_SEED", "42")
            .args(["sim", "housing", "--agents", "150", "--reps", "2", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["report.json", "deltas.csv", "trades.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    let report: Value = serde_json::from_slice(&read(a.path(), "report.json")).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["seed"], 42);
    let deltas = String::from_utf8(read(a.path(), "deltas.csv")).unwrap();
    assert!(deltas.starts_with("rep,agent,budget0,welfare_baseline,welfare_treatment,delta\n"));
    assert_eq!(deltas.lines().count(), 1 + 300);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "seed = 9\nagents = 60\nwealth = \"equal:500\"\n").unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "sim", "housing", "--agents", "40", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let deltas = String::from_utf8(read(dir.path(), "deltas.csv")).unwrap();
    assert_eq!(deltas.lines().count(), 1 + 40);
    assert!(deltas.lines().nth(1).unwrap().starts_with("0,0,500.0,"));
    let report: Value = serde_json::from_slice(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(report["seed"], 9);

    let json_cfg = dir.path().join("run.json");
    std::fs::write(&json_cfg, r#"{"seed": 9, "agentz": 60}"#).unwrap();
    let out = run(&["--config", json_cfg.to_str().unwrap(), "sim", "housing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--seed", "3", "sim", "sweep", "--agents", "120", "--tau-list", "0,10,prop:0.2,1e9", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(read(dir.path(), "sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "tau,mode,total_gain,trades");
    assert_eq!(lines.len(), 5);
    assert!(lines[3].ends_with(",0.0,0") || lines[3].ends_with(",0,0"), "{}", lines[3]);
}

#[test]
fn light_acceptance_suite_passes_and_lists_each_criterion_once() {
    let out = run(&["acceptance", "--skip-heavy"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ids: Vec<u64> = doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_u64().unwrap())
        .collect();
    assert_eq!(ids, (1..=11).collect::<Vec<_>>());
}

#[test]
fn tampered_split_fails_the_strategy_scenario() {
    let out = run(&["acceptance", "--skip-heavy", "--lambda", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c4 = &doc["results"][3];
    assert_eq!(c4["id"], 4);
    assert_eq!(c4["passed"], false);
    assert!(c4["measured"].as_str().unwrap().contains("resale price 57"));
}
