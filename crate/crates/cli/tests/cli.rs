use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_growdiff"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn manifest(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("manifest on stdout")
}

#[test]
fn eigen_baseline_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "eigen", "--D", "1", "--L0", "3.14159265", "--gamma0", "0", "--gamma1", "0", "--modes", "4", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(&out);
    let sigmas: Vec<f64> = serde_json::from_value(m["body"]["sigmas"].clone()).unwrap();
    for (k, s) in sigmas.iter().enumerate() {
        let n = (k + 1) as f64;
        assert!((s + n * n).abs() < 1e-6, "{s}");
    }
    assert!(dir.path().join("eigen.csv").exists());
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("eigen.json")).unwrap()).unwrap();
    assert_eq!(on_disk, m);
    assert_eq!(m["schema_version"], 1);
}

#[test]
fn missing_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["eigen", "--D", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("L0"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"D": 1, "L0": 1, "colour": "red"}"#).unwrap();
    let out = run(&["eigen", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("eigen_baseline.json");
    let out = run(&["eigen", "--config", cfg.to_str().unwrap(), "--modes", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(manifest(&out)["body"]["sigmas"].as_array().unwrap().len(), 2);
}

#[test]
fn grid_changes_only_grid_dependent_fields() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["eigen", "--D", "1", "--L0", "2", "--gamma0", "0.5", "--modes", "3", "--out", d];
    let a = manifest(&run(&[&base[..], &["--grid", "64"]].concat()));
    let b = manifest(&run(&[&base[..], &["--grid", "128"]].concat()));
    assert_eq!(a["body"]["params"], b["body"]["params"]);
    assert_ne!(a["body"]["grid_size"], b["body"]["grid_size"]);
    let sa: Vec<f64> = serde_json::from_value(a["body"]["sigmas"].clone()).unwrap();
    let sb: Vec<f64> = serde_json::from_value(b["body"]["sigmas"].clone()).unwrap();
    for (x, y) in sa.iter().zip(&sb) {
        assert!((x - y).abs() < 1e-5 * x.abs());
    }
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("moving_interval.json");
    for d in [&a, &b] {
        let out = run(&["numeric", "--config", cfg.to_str().unwrap(), "--dt", "1e-3", "--grid", "64", "--out", d.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["numeric_field.csv", "numeric.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn compare_passes_and_breaches() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cfg = configs().join("moving_interval.json");
    let ok = run(&["compare", "--config", cfg.to_str().unwrap(), "--out", d]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let table = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert!(table.starts_with("t,max_abs,rel_linf\n"));
    let coarse = run(&["compare", "--config", cfg.to_str().unwrap(), "--grid", "32", "--out", d]);
    assert_eq!(coarse.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&coarse.stderr).contains("worst at xi"));
}

#[test]
fn exact_collapse_is_tiny_near_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("collapsing_sqrt.json");
    let out = run(&["exact", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("exact_field.csv")).unwrap();
    let late = csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>()).filter(|r| r[2] > 0.49);
    let mut count = 0;
    for r in late {
        assert!(r[3].abs() < 1e-6);
        count += 1;
    }
    assert!(count > 0);
    let beyond = run(&["exact", "--config", cfg.to_str().unwrap(), "--times", "0.6", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(beyond.status.code(), Some(2));
}

#[test]
fn critical_fit_at_the_critical_rate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("critical_1d.json");
    let out = run(&["critical", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out);
    let fit = &m["body"]["fit"];
    assert!(fit["fitted_exponent"].as_f64().unwrap().abs() <= 0.05);
    assert_eq!(m["body"]["envelope"]["holds"], true);
    let csv = std::fs::read_to_string(dir.path().join("envelope.csv")).unwrap();
    assert!(csv.starts_with("t,xi,sub,w,super,slack\n"));
    assert!(dir.path().join("critical_fit.json").exists());
}

#[test]
fn critical_fit_breach_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("critical_1d.json");
    let out = run(&[
        "critical", "--config", cfg.to_str().unwrap(), "--t-lo", "10", "--t-hi", "1000", "--no-envelope", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn critical_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cfg = configs().join("critical_1d.json");
    let out = run(&["critical", "--config", cfg.to_str().unwrap(), "--n-dim", "4", "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["critical", "--config", cfg.to_str().unwrap(), "--t-lo", "100", "--t-hi", "1000", "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["critical", "--config", cfg.to_str().unwrap(), "--alpha", "1.0", "--out", d]);
    assert_eq!(out.status.code(), Some(2));
}
