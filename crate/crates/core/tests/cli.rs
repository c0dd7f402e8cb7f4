use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lvna(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lvna")).args(args).current_dir(dir).output().expect("spawn lvna")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SCALED_SCALARS: &str = r#"{
  "left":  {"algebra": {"blocks": [1]}, "norm": {"kind": "kernel"}},
  "right": {"algebra": {"blocks": [1]}, "norm": {"kind": "kernel", "scale": 2.0}},
  "bridges": [{"kind": "kernel"}, {"kind": "sum"}],
  "net": {"count": 32, "probes": 8}
}"#;

#[test]
fn dist_prints_estimate_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.json", SCALED_SCALARS);
    let out = lvna(&["--config", &cfg, "dist"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!((lo - 1.0).abs() < 1e-9 && lo <= hi && hi <= 1.0 + 1e-12, "{v}");
    for key in ["bridge", "slack", "radii"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn dist_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.json",
        r#"{
          "left":  {"algebra": {"blocks": [2], "multiplicities": [2], "omega": [[0.6,0],[0,0],[0,0],[0.8,0]]}, "norm": {"kind": "kernel"}},
          "right": {"algebra": {"blocks": [1, 1]}, "norm": {"kind": "weighted_entry", "weights": [1.0, 2.0]}},
          "bridges": [{"kind": "sum"}],
          "net": {"count": 48, "probes": 16}
        }"#,
    );
    let a = lvna(&["--config", &cfg, "--seed", "7", "dist"], dir.path());
    let b = lvna(&["--config", &cfg, "--seed", "7", "--threads", "1", "dist"], dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn schema_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(lvna(&["--config", &bad, "dist"], dir.path()).status.code(), Some(2));
    let unknown = write(dir.path(), "u.json", &SCALED_SCALARS.replace("\"net\"", "\"nets\""));
    assert_eq!(lvna(&["--config", &unknown, "dist"], dir.path()).status.code(), Some(2));
}

#[test]
fn no_valid_bridge_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.json",
        r#"{
          "left":  {"algebra": {"blocks": [1]}, "norm": {"kind": "operator"}},
          "right": {"algebra": {"blocks": [1]}, "norm": {"kind": "operator"}},
          "bridges": [{"kind": "kernel"}]
        }"#,
    );
    assert_eq!(lvna(&["--config", &cfg, "dist"], dir.path()).status.code(), Some(3));
}

#[test]
fn freefield_writes_sweep_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.json", r#"{"masses": [0.25, 1.0], "cutoff": 2, "net": {"count": 32, "probes": 8}}"#);
    let out = lvna(&["--config", &cfg, "--out", "res", "freefield"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("res/sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m_prime,certified_bound,net_sup,qgh_upper"));
    assert_eq!(lines.count(), 2);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("res/sweep.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("max_bound="));
}

#[test]
fn non_separating_vacuum_exits_four_without_output() {
    let dir = tempfile::tempdir().unwrap();
    // Two Weyl operators with real and imaginary coefficients generate a
    // simple block on which the vacuum is not separating.
    let cfg = write(
        dir.path(),
        "f.json",
        r#"{"momenta": [1.0], "cutoff": 1, "generators": [[[0.7, 0.0]], [[0.0, 0.7]]], "net": {"count": 16, "probes": 4}}"#,
    );
    let out = lvna(&["--config", &cfg, "--out", "res", "freefield"], dir.path());
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("res").exists());
}

#[test]
fn verify_reports_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let ok = lvna(&["verify"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let bad = lvna(&["verify", "--inject", "bridge-restriction"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("suite bridge:") && text.contains("verify: FAIL (bridge)"), "{text}");
}

#[test]
fn net_of_two_points_is_zero_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "n.json", r#"{"algebra": {"blocks": [2, 1]}, "target": "unit_ball", "count": 2, "probes": 8}"#);
    assert_eq!(lvna(&["--config", &cfg, "--out", "a", "net"], dir.path()).status.code(), Some(0));
    assert_eq!(lvna(&["--config", &cfg, "--out", "b", "net"], dir.path()).status.code(), Some(0));
    let a = fs::read(dir.path().join("a/net.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b/net.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let z = |re: f64| serde_json::json!([re, 0.0]);
    let zero = serde_json::json!([[z(0.0), z(0.0), z(0.0), z(0.0)], [z(0.0)]]);
    let one = serde_json::json!([[z(1.0), z(0.0), z(0.0), z(1.0)], [z(1.0)]]);
    assert_eq!(v["blocks"], serde_json::json!([zero, one]));
    assert_eq!(v["covering_estimate"]["method"], "empirical");
}
