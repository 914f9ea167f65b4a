use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bdf_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdf-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(bdf_lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bdf_lab(&["pekar", "--config", "/nonexistent/run.toml", "--out", &out]).status.code(),
        Some(2)
    );
    assert_eq!(
        bdf_lab(&["dispersion", "--override", "model.bogus=1", "--out", &out]).status.code(),
        Some(2)
    );
    assert_eq!(
        bdf_lab(&["dispersion", "--override", "model.alpha=-1", "--out", &out]).status.code(),
        Some(2)
    );
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[model]\nalpha = \"x\"\n").unwrap();
    assert_eq!(
        bdf_lab(&["dispersion", "--config", bad.to_str().unwrap(), "--out", &out]).status.code(),
        Some(2)
    );
}

#[test]
fn non_convergence_exits_1_and_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = bdf_lab(&["dispersion", "--override", "dispersion.max_iter=1", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no convergence"));
    let rec: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("asymptotics.json")).unwrap()).unwrap();
    assert_eq!(rec["fixed_point"]["converged"], false);
    assert!(rec["asymptotics"].is_null());
}

#[test]
fn config_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[model]\nalpha = 0.02\nL = 0.1\n\n[dispersion]\nnodes = 128\n\n[output]\ndir = \"ignored\"\n").unwrap();
    let out = dir.path().join("res");
    let o = bdf_lab(&["dispersion", "--config", cfg.to_str().unwrap(), "--out", &out_arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("dispersion.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("p,g0,g1,e_tilde"));
    assert_eq!(csv.lines().count(), 129);
    let rec: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("asymptotics.json")).unwrap()).unwrap();
    assert_eq!(rec["params"]["alpha"], 0.02);
    assert!((rec["params"]["L"].as_f64().unwrap() - 0.1).abs() < 1e-12);
}

#[test]
fn regime_warning_recorded_and_checks_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = bdf_lab(&[
        "verify",
        "--override",
        "model.alpha=2",
        "--override",
        "polarization.k_nodes=32",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(rep["regime_warning"], true);
    let checks = rep["checks"].as_array().unwrap();
    assert!(checks.len() > 20);
    let passed = rep["passed"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if passed { 0 } else { 1 }));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--override", "polarization.k_nodes=24", "--override", "dispersion.nodes=128"];
    for dir in [&a, &b] {
        let out = out_arg(dir.path());
        let mut full = vec!["polarization", "--out", &out];
        full.extend_from_slice(&args);
        assert!(bdf_lab(&full).status.success());
        assert!(bdf_lab(&["pekar", "--out", &out]).status.success());
    }
    for name in ["polarization.csv", "polarization_free.csv", "polarization.json", "pekar.csv", "pekar_summary.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}
