use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zecap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zecap"))
        .args(args)
        .current_dir(dir)
        .env_remove("ZECAP_SEED")
        .env_remove("ZECAP_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_builtin(dir: &Path, name: &str) -> String {
    let file = format!("{name}.json");
    let out = zecap(&["builtin", name, "--out", &file], dir);
    assert!(out.status.success());
    file
}

#[test]
fn builtin_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["identity-d3", "depolarizing-p0.25", "pentagon"] {
        let file = write_builtin(dir.path(), name);
        let out = zecap(&["validate", &file], dir.path());
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: "));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(zecap(&["analyze", "missing.json"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    assert_eq!(zecap(&["validate", "bad.json"], dir.path()).status.code(), Some(1));
    std::fs::write(dir.path().join("empty.json"), r#"{"name": "x"}"#).unwrap();
    assert_eq!(zecap(&["analyze", "empty.json"], dir.path()).status.code(), Some(1));
    assert_eq!(zecap(&["builtin", "nonsense"], dir.path()).status.code(), Some(1));
    let spec = write_builtin(dir.path(), "identity-d2");
    let out = zecap(&["analyze", &spec, "--out", "no/such/dir/report.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_trace_preserving_kraus_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{"name": "leaky", "dim": 2, "kraus": [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}"#;
    std::fs::write(dir.path().join("leaky.json"), spec).unwrap();
    let out = zecap(&["validate", "leaky.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_pentagon_writes_report_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_builtin(dir.path(), "pentagon");
    let out = zecap(&["analyze", &spec, "--out", "r.json", "--dot", "g.dot"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero-error capacity >="));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["graph"]["vertex_count"], 5);
    assert_eq!(report["capacity"]["per_n"][1]["alpha"], 5);
    assert_eq!(report["provenance"], "given");
    let dot = std::fs::read_to_string(dir.path().join("g.dot")).unwrap();
    assert_eq!(dot.matches(" -- ").count(), 5);
}

#[test]
fn depolarizing_reports_zero_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_builtin(dir.path(), "depolarizing-p1");
    let report = json(&zecap(&["analyze", &spec, "--restarts", "4", "--iters", "200"], dir.path()));
    assert_eq!(report["positive_zero_error_capacity"], false);
    assert!(report["summary"].as_str().unwrap().starts_with("zero-error capacity = 0"));
}

#[test]
fn seed_flag_and_env_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_builtin(dir.path(), "dephasing-p0.3");
    let args = ["search", &spec, "--restarts", "3", "--iters", "150"];
    let by_flag = zecap(&[&args[..], &["--seed", "5"]].concat(), dir.path());
    let by_env = Command::new(env!("CARGO_BIN_EXE_zecap"))
        .args(args)
        .current_dir(dir.path())
        .env("ZECAP_SEED", "5")
        .output()
        .unwrap();
    assert!(by_flag.status.success());
    assert_eq!(by_flag.stdout, by_env.stdout);
    assert_eq!(json(&by_flag)["search"]["config"]["seed"], 5);
}

#[test]
fn code_command_certifies_identity() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_builtin(dir.path(), "identity-d2");
    let report = json(&zecap(&["code", &spec, "--n", "3"], dir.path()));
    assert_eq!(report["code"]["messages"], 8);
    assert_eq!(report["code"]["verification"]["passed"], true);
}

#[test]
fn theta_of_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = r#"{"vertex_count": 5, "adjacency": [[1, 4], [0, 2], [1, 3], [2, 4], [0, 3]]}"#;
    std::fs::write(dir.path().join("c5.json"), c5).unwrap();
    let out = json(&zecap(&["theta", "c5.json", "--tol", "1e-10"], dir.path()));
    assert!((out["theta"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-8);
    assert_eq!(out["edge_count"], 5);
}

#[test]
fn invalid_threads_setting() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_zecap"))
        .args(["builtin", "pentagon"])
        .current_dir(dir.path())
        .env("ZECAP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
