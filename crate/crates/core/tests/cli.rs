use std::path::Path;
use std::process::{Command, Output};

fn asympt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asympt"))
        .args(args)
        .env_remove("ASYMPT_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn facon_listing() {
    let o = asympt(&["facons", "--dim", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 19);
    assert!(text.lines().any(|l| l == "(3)[1,2]"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "dim 3\nF1 = x1 +\nF2 = x2\nF3 = x3\n");
    let four = write(dir.path(), "four.txt", "dim 4\nF1 = x1\nF2 = x2\nF3 = x3\nF4 = x4^2\n");
    let ex = write(dir.path(), "ex.txt", "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3\n");

    let o = asympt(&["classify", "--input", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:"), "diagnostic names the line");

    assert_eq!(asympt(&["classify", "--input", &four]).status.code(), Some(2));
    assert_eq!(asympt(&["classify", "--input", &ex, "--frobnicate"]).status.code(), Some(1));
    assert_eq!(asympt(&["check", "--quick", "--inject-fault", "ring laws"]).status.code(), Some(2));

    // The sampled residual is around 1e-8, so a tiny tolerance must trip the oracle.
    let o = asympt(&["classify", "--input", &ex, "--probe", "--tol", "1e-14"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn classify_writes_report_with_replay_data() {
    let dir = tempfile::tempdir().unwrap();
    let ex = write(dir.path(), "ex.txt", "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3\n");
    let out = dir.path().join("nested").join("report.json");
    let o = asympt(&["classify", "--input", &ex, "--probe", "--seed", "11", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["oracle_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["tolerances"]["oracle_tol"], 1e-5);
    let eqs: Vec<&str> = v["components"].as_array().unwrap().iter().map(|c| c["equation"].as_str().unwrap()).collect();
    assert_eq!(eqs, ["α1 = 0", "α2 = 0"]);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.txt", "dim 3\nF1 = x1\nF2 = x2\nF3 = x3\n");
    let o = Command::new(env!("CARGO_BIN_EXE_asympt"))
        .args(["classify", "--input", &id])
        .env("ASYMPT_SEED", "99")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 99);
    assert_eq!(v["proper"], true);
}

#[test]
fn probe_exports_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let ex = write(dir.path(), "ex.txt", "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3\n");
    let cloud = dir.path().join("cloud.jsonl");
    let o = asympt(&["probe", "--input", &ex, "--samples", "2000", "--steps", "3", "--radius-start", "1e4", "--cloud", cloud.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&cloud).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["alpha"].as_array().unwrap().len(), 6);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["points"].as_u64().unwrap() > 0);
    assert_eq!(asympt(&["probe", "--input", &ex, "--steps", "1"]).status.code(), Some(1));
}
