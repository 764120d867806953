use std::process::Command;

use serde_json::Value;

fn qsym(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qsym")).args(args).output().expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let v = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v, String::from_utf8_lossy(&out.stderr).to_string())
}

fn temp_file(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qsym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().to_string()
}

#[test]
fn datum_reports_admissibility() {
    let (code, v, _) = qsym(&["datum", "--datum", "A3-X2"]);
    assert_eq!(code, 0);
    assert_eq!(v["admissible"], Value::Bool(true));
    assert_eq!(v["tau0"], serde_json::json!([3, 2, 1]));
    let bad = temp_file("a2x1.json", r#"{"type": "A", "rank": 2, "X": [1]}"#);
    let (code, v, _) = qsym(&["datum", "--datum", &bad]);
    assert_eq!(code, 1);
    assert_eq!(v["admissible"], Value::Bool(false));
}

#[test]
fn malformed_json_is_a_usage_error() {
    let bad = temp_file("broken.json", "{ not json");
    let (code, _, err) = qsym(&["datum", "--datum", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("usage"));
    let (code, _, _) = qsym(&["verify", "--datum", "A1-split", "--checks", "everything"]);
    assert_eq!(code, 2);
}

#[test]
fn quasik_support_and_cutoff_zero() {
    let (code, v, _) = qsym(&["quasik", "--datum", "A1-split", "--cutoff", "6"]);
    assert_eq!(code, 0);
    let weights: Vec<Value> = v["quasik"]["components"].as_array().unwrap().iter().map(|c| c[0].clone()).collect();
    assert_eq!(weights, serde_json::json!([[0], [2], [4], [6]]).as_array().unwrap().clone());
    let (_, v, _) = qsym(&["quasik", "--datum", "A1-split", "--cutoff", "0"]);
    assert_eq!(v["quasik"]["components"].as_array().unwrap().len(), 1);
}

#[test]
fn corrupted_params_name_the_constraint() {
    let p = temp_file("bad-params.json", r#"{"c": {"1": "q^-2"}}"#);
    let (code, v, _) = qsym(&["quasik", "--datum", "A1-split", "--params", &p]);
    assert_eq!(code, 1);
    let failures = v["constraint_failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f.as_str().unwrap().starts_with("c_tau(i)")));
}

#[test]
fn verify_filters_checks_and_is_deterministic() {
    let args = ["verify", "--datum", "A1-split", "--modules", "V(w)", "--checks", "reflection", "--jobs", "2"];
    let (code, v, _) = qsym(&args);
    assert_eq!(code, 0);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["check"] == "reflection"));
    assert_eq!(v["operators"]["V(w)"]["K"], serde_json::json!([[0, 1, "-q^(-1/2)"], [1, 0, "q^(-1/2)"]]));
    let strip = |mut v: Value| {
        v["millis"] = Value::Null;
        for c in v["checks"].as_array_mut().unwrap() {
            c["millis"] = Value::Null;
        }
        v
    };
    let (_, w, _) = qsym(&args);
    assert_eq!(strip(v), strip(w));
}

#[test]
fn verify_default_catalog_run_passes() {
    let (code, v, _) = qsym(&["verify", "--datum", "A2-quasisplit", "--jobs", "2", "--seed", "5"]);
    assert_eq!(code, 0, "{v:#}");
    assert_eq!(v["failed_checks"], 0);
}
