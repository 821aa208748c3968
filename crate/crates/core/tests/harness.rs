use std::path::Path;
use std::process::{Command, Output};

use lpeuler::harness::config::RunConfig;
use lpeuler::harness::io::{decode, read_field, FieldFile};
use lpeuler::Error;

const SMALL: &str = r#"{"grid": {"N": 256}, "counterexample": {"k_max": 2, "theta": 0.0}, "simulation": {"steps": 8, "cadence": 4}}"#;

fn lpeuler(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpeuler"))
        .args(args)
        .env("LP_OUT_DIR", dir)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, SMALL).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_errors_carry_positions() {
    match RunConfig::from_json("{\n  \"grid\": {\"n\": 256}\n}") {
        Err(Error::Config(m)) => assert!(m.contains("line 2"), "{m}"),
        other => panic!("expected a config error, got {other:?}"),
    }
    assert!(matches!(RunConfig::from_json(r#"{"grid": {"N": 100}}"#), Err(Error::Config(_))));
    assert!(matches!(RunConfig::from_json(r#"{"simulation": {"cadence": "x"}}"#), Err(Error::Config(_))));
    assert!(RunConfig::from_json(SMALL).is_ok());
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"unknown": 1}"#).unwrap();
    let out = lpeuler(dir.path(), &["--config", p.to_str().unwrap(), "build"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lpeuler(dir.path(), &["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lpeuler(dir.path(), &["--threads", "0", "build"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_writes_field_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = lpeuler(dir.path(), &["--config", &cfg, "build"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["u0.lpf1", "u0.meta.json", "alpha.json", "norms.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    match read_field(&dir.path().join("u0.lpf1")).unwrap() {
        FieldFile::Spectral(u) => {
            assert_eq!(u.grid().n(), 256);
            assert_eq!(u.ncomp(), 2);
        }
        FieldFile::Real(_) => panic!("expected a spectral field"),
    }
    let bytes = std::fs::read(dir.path().join("u0.lpf1")).unwrap();
    assert!(decode(&bytes[..bytes.len() - 1]).is_err());
    let alpha: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("alpha.json")).unwrap()).unwrap();
    assert!(alpha.as_array().unwrap().iter().any(|e| e["tag"] == "low"));
}

#[test]
fn zero_horizon_gives_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t0.json");
    std::fs::write(&p, r#"{"grid": {"N": 256}, "counterexample": {"k_max": 2}, "simulation": {"T1": 0.0}}"#).unwrap();
    let out = lpeuler(dir.path(), &["--config", p.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn simulate_analyze_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = lpeuler(dir.path(), &["--config", &cfg, "simulate", "--kmax-sweep", "1,3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = lpeuler(dir.path(), &["analyze"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["inflation.json", "continuity.json", "discontinuity.json", "discontinuity.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let out = lpeuler(dir.path(), &["plot"]);
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read(dir.path().join("trace_gk.svg")).unwrap();
    assert!(String::from_utf8_lossy(&first).starts_with("<svg"));
    lpeuler(dir.path(), &["plot"]);
    assert_eq!(first, std::fs::read(dir.path().join("trace_gk.svg")).unwrap());
    assert!(dir.path().join("trace_norms.svg").exists());
    assert!(dir.path().join("discontinuity.svg").exists());
}

#[test]
fn verify_writes_suite_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = lpeuler(dir.path(), &["verify", "--suite", "partition"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("[PASS]"), "{stdout}");
    let suite: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("suite.json")).unwrap()).unwrap();
    assert_eq!(suite["checks"][0]["criterion"], 1);
}
