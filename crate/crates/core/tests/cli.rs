//! End-to-end CLI tests: exit codes, report shape against the published
//! schema, and byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_xxz-bethe")
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

const TWO_SITE: &str = r#"{
  "gamma": [0.7, 0],
  "kappa": [1.3, 0],
  "sites": [{"spin": "1/2", "z": [1, 0]}, {"spin": "1/2", "z": [2.3, 0]}],
  "k": 1
}"#;

const ROOT_M2: &str = r#"{
  "root_of_unity": {"M": 2, "K": 1},
  "p": 0,
  "sites": [{"spin": "1/2", "z": [1, 0]}, {"spin": "1/2", "z": [2.3, 0]}],
  "k": 0,
  "m": 1,
  "u_list": [[1.7, 0.3]]
}"#;

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let raw = std::fs::read_to_string(path).expect("schema shipped in repo");
    let doc: Value = serde_json::from_str(&raw).unwrap();
    jsonschema::validator_for(&doc).expect("schema compiles")
}

#[test]
fn reports_validate_against_published_schema() {
    let dir = tempfile::tempdir().unwrap();
    let two = write_config(&dir, "two.json", TWO_SITE);
    let root = write_config(&dir, "root.json", ROOT_M2);
    let validator = schema();
    let cases: Vec<(&str, &PathBuf)> = vec![
        ("identities", &two),
        ("solve", &two),
        ("verify", &two),
        ("census", &two),
        ("spectrum", &two),
        ("nilpotency", &root),
        ("degenerate", &root),
        ("xeq", &root),
        // error report shape is also schema-valid
        ("nilpotency", &two),
    ];
    for (sub, cfg) in cases {
        let out = run(&[sub, "--config", cfg.to_str().unwrap()]);
        let report: Value = serde_json::from_slice(&out.stdout)
            .unwrap_or_else(|e| panic!("{sub}: invalid JSON: {e}"));
        let errors: Vec<String> = validator
            .iter_errors(&report)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "{sub}: schema violations: {errors:?}");
    }
}

#[test]
fn exit_codes_follow_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let two = write_config(&dir, "two.json", TWO_SITE);
    let root = write_config(&dir, "root.json", ROOT_M2);

    let out = run(&["solve", "--config", two.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["results"]["solutions"].as_array().unwrap().len(), 2);

    // nilpotency needs a root-of-unity anisotropy: precondition failure
    let out = run(&["nilpotency", "--config", two.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["error"].as_str().unwrap().contains("root_of_unity"));

    let out = run(&["degenerate", "--config", root.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // config errors exit 2 before any report
    let bad = write_config(
        &dir,
        "bad.json",
        r#"{"gamma":[0.7,0],"sites":[{"spin":"1/3","z":[1,0]}]}"#,
    );
    let out = run(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sites[0].spin"));
}

#[test]
fn reports_are_deterministic_except_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let two = write_config(&dir, "two.json", TWO_SITE);
    let normalize = |bytes: &[u8]| -> String {
        let text = String::from_utf8(bytes.to_vec()).unwrap();
        let mut value: Value = serde_json::from_str(&text).unwrap();
        value["wall_time_ms"] = Value::from(0.0);
        // byte comparison of the re-rendered documents
        serde_json::to_string_pretty(&value).unwrap()
    };
    let a = run(&["verify", "--config", two.to_str().unwrap()]);
    let b = run(&["verify", "--config", two.to_str().unwrap()]);
    assert_eq!(normalize(&a.stdout), normalize(&b.stdout));
    // raw bytes differ only in the wall-time line
    let raw_a = String::from_utf8(a.stdout).unwrap();
    let raw_b = String::from_utf8(b.stdout).unwrap();
    let diff: Vec<(&str, &str)> = raw_a
        .lines()
        .zip(raw_b.lines())
        .filter(|(x, y)| x != y)
        .collect();
    assert!(
        diff.iter().all(|(x, _)| x.contains("wall_time_ms")),
        "{diff:?}"
    );
}

#[test]
fn out_flag_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let two = write_config(&dir, "two.json", TWO_SITE);
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "spectrum",
        "--config",
        two.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(report["subcommand"], "spectrum");
    // sector dimensions 1, 2, 1
    let sectors = report["results"]["sectors"].as_array().unwrap();
    let dims: Vec<u64> = sectors
        .iter()
        .map(|s| s["dimension"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, vec![1, 2, 1]);
}

#[test]
fn seed_and_tol_overrides_are_applied() {
    let dir = tempfile::tempdir().unwrap();
    let two = write_config(&dir, "two.json", TWO_SITE);
    let out = run(&["solve", "--config", two.to_str().unwrap(), "--seed", "7"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 7);
    // an absurdly tight tolerance fails the checks and exits 1
    let out = run(&[
        "identities",
        "--config",
        two.to_str().unwrap(),
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], Value::Bool(false));
}
