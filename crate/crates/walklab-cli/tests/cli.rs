//! End-to-end checks of the binary: flag handling, output files, exit codes
//! and the stdout JSON contract.

use std::process::Command;

fn walklab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_walklab"))
}

#[test]
fn gen_then_metric_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = walklab()
        .args(["gen", "--graph", "cycle:n=12", "--seed", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["n"], 12);
    assert_eq!(doc["schema_version"], "1");

    let graph_file = dir.path().join("graph.edges");
    let out2_dir = tempfile::tempdir().unwrap();
    let out = walklab()
        .args(["metric", "--metric", "resistance", "--source", "0", "--target", "6"])
        .arg("--graph-file")
        .arg(&graph_file)
        .args(["--seed", "2", "--out"])
        .arg(out2_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // Antipodal resistance on C12: two six-edge arcs in parallel = 3 ohms.
    let r = doc["result"]["resistance"].as_f64().unwrap();
    assert!((r - 3.0).abs() < 1e-9, "resistance {r}");
    assert!(out2_dir.path().join("manifest.json").exists());
}

#[test]
fn check_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = walklab()
        .args(["check", "--tag", "cor12", "--graph", "path:n=8", "--seed", "3"])
        .args(["--format", "csv", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.starts_with("relation_tag,"));
    assert!(csv.contains("cor12,path:n=8"));
    assert!(csv.contains(",pass,"));
}

#[test]
fn missing_pair_is_a_config_error_with_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = walklab()
        .args(["metric", "--metric", "hit", "--graph", "cycle:n=8", "--seed", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], "config");
}

#[test]
fn unknown_relation_tag_fails_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = walklab()
        .args(["check", "--tag", "thm99", "--graph", "path:n=4", "--seed", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], "relation");
}

#[test]
fn workers_env_override_does_not_change_results() {
    let run = |env: Option<&str>| {
        let dir = tempfile::tempdir().unwrap();
        let mut cmd = walklab();
        cmd.args(["metric", "--metric", "cov", "--graph", "cycle:n=16"])
            .args(["--seed", "9", "--trials", "40", "--out"])
            .arg(dir.path());
        if let Some(w) = env {
            cmd.env("WALKLAB_WORKERS", w);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        std::fs::read(dir.path().join("results.json")).unwrap()
    };
    assert_eq!(run(None), run(Some("2")));
}
