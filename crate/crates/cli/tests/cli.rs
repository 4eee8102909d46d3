use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_cqbc"))
}

fn shipped(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn run(cmd: &str, cfg: &Value, extra: &[&str]) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    let out = Command::new(bin())
        .arg(cmd)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .args(extra)
        .output()
        .unwrap();
    (out, dir)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn shipped_configs_verify() {
    for name in ["ex1.json", "ex2.json"] {
        let (out, _d) = run("verify-examples", &shipped(name), &[]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert_eq!(r["results"]["pass"], json!(true));
        assert_eq!(r["erratum_flags"]["rx_bound_reading"], json!("per_receiver_s_j"));
        assert_eq!(r["erratum_flags"]["list_threshold_sign"], json!("plus_conditional_entropy"));
        assert!(r["erratum_flags"]["rx1_sum_bound_reading"].is_string());
    }
}

#[test]
fn invalid_example_parameter_is_config_error() {
    let mut cfg = shipped("ex1.json");
    cfg["examples"]["ex1"]["tau"] = json!(0.6);
    let (out, _d) = run("verify-examples", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn boundary_points_are_members() {
    let cfg = shipped("ex1.json");
    let (out, d) = run("project", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let boundary = std::fs::read_to_string(d.path().join("out/boundary.csv")).unwrap();
    assert!(d.path().join("out/constraints.csv").exists());
    let mut rdr = csv::Reader::from_reader(boundary.as_bytes());
    let pts: Vec<[f64; 3]> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert!(!pts.is_empty());
    for p in pts.iter().step_by(7) {
        // nudge inward so 12-digit rounding cannot push a point outside
        let mut c = cfg.clone();
        c["point"] = json!({ "rates": p.map(|x| (x - 1e-9).max(0.0)) });
        let (o, _d) = run("check-point", &c, &[]);
        assert_eq!(o.status.code(), Some(0));
        let r = report(&o);
        assert_eq!(r["results"]["member"], json!(true), "{p:?}");
        assert_eq!(r["results"]["lp_oracle_member"], json!(true), "{p:?}");
    }
    let mut c = cfg.clone();
    c["point"] = json!({ "rates": [1.0, 1.0, 1.0] });
    let r = report(&run("check-point", &c, &[]).0);
    assert_eq!(r["results"]["member"], json!(false));
}

#[test]
fn assignment_mode_reports_slacks() {
    let mut cfg = shipped("ex1.json");
    cfg["point"] = json!({ "rates": [0.05, 0.1, 0.1], "b1": 0.0, "s_bits": [0.3, 0.3] });
    let (out, d) = run("check-point", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["results"]["mode"], json!("assignment"));
    assert!(std::fs::read_to_string(d.path().join("out/slack.csv")).unwrap().starts_with("branch,label,slack"));
}

#[test]
fn empty_pmf_is_config_error() {
    let mut cfg = shipped("ex1.json");
    cfg["pmf"]["entries"] = json!([]);
    let (out, _d) = run("quantities", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_prime_field_exits_5() {
    let mut cfg = shipped("ex1.json");
    cfg["q"] = json!(4);
    let (out, _d) = run("quantities", &cfg, &[]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn unknown_field_is_config_error() {
    let mut cfg = shipped("ex1.json");
    cfg["bogus"] = json!(1);
    assert_eq!(run("quantities", &cfg, &[]).0.status.code(), Some(2));
}

#[test]
fn zero_trials_is_ok() {
    let mut cfg = shipped("ex1.json");
    cfg["sim"]["trials"] = json!(0);
    cfg["sim"]["ns"] = json!([8]);
    let (out, _d) = run("simulate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["results"]["runs"][0]["trials"], json!(0));
}

#[test]
fn oversized_codebook_exits_4() {
    let mut cfg = shipped("ex1.json");
    cfg["sim"]["ns"] = json!([64]);
    cfg["sim"]["trials"] = json!(1);
    let (out, _d) = run("simulate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simulate_needs_classical_channel() {
    let mut cfg = shipped("ex2.json");
    cfg["sim"] = shipped("ex1.json")["sim"].clone();
    assert_eq!(run("simulate", &cfg, &[]).0.status.code(), Some(2));
}

#[test]
fn report_echo_round_trips_hash() {
    let cfg = shipped("ex1.json");
    let (out, _d) = run("quantities", &cfg, &["--seed", "9"]);
    let r = report(&out);
    assert_eq!(r["config"]["seed"], json!(9));
    // feeding the echoed config back must reproduce the same hash
    let (again, _d2) = run("quantities", &r["config"], &[]);
    let r2 = report(&again);
    assert_eq!(r["config_hash"], r2["config_hash"]);
    assert_eq!(r["results"], r2["results"]);
}

#[test]
fn simulation_is_seed_deterministic() {
    let mut cfg = shipped("ex1.json");
    cfg["sim"]["ns"] = json!([8]);
    cfg["sim"]["trials"] = json!(300);
    let a = run("simulate", &cfg, &["--format", "csv"]).0;
    let b = run("simulate", &cfg, &["--format", "csv"]).0;
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("n,trials,k1"));
}
