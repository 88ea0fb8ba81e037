use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwlab"))
        .args(args)
        .env_remove("FWLAB_THREADS")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn cross(report: &Value) -> Vec<f64> {
    report["cross"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["hamiltonian_disagreement"].as_f64().unwrap())
        .collect()
}

#[test]
fn free_particle_at_rest_is_identity() {
    let out = fwlab(&["free", "--mass", "1", "--p", "0,0,0", "--methods", "eriksen"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let d = &report["rows"][0]["diagnostics"];
    assert_eq!(d["block_diagonality"].as_f64(), Some(0.0));
    assert_eq!(d["unitarity_residual"].as_f64(), Some(0.0));
}

#[test]
fn free_particle_methods_agree() {
    let out = fwlab(&["free", "--mass", "1", "--p", "0,0,0.75", "--methods", "eriksen,exactcase,stepwise"]);
    assert_eq!(code(&out), 0);
    let c = cross(&json(&out));
    assert_eq!(c.len(), 3);
    assert!(c.iter().all(|&x| x <= 1e-8), "{c:?}");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["free", "--mass", "-1", "--p", "0,0,0"][..],
        &["free", "--mass", "1", "--p", "0,0"],
        &["free", "--mass", "1", "--p", "0,0,0", "--methods", "magic"],
        &["lattice", "--n", "3", "--L", "8", "--mass", "1"],
        &["lattice", "--n", "8", "--L", "8", "--mass", "1", "--potential", "cubic:1"],
        &["bogus"],
        &[],
    ] {
        let out = fwlab(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_and_version_exit_zero() {
    for sub in ["free", "lattice", "matrix", "sweep"] {
        let out = fwlab(&[sub, "--help"]);
        assert_eq!(code(&out), 0);
        let text = String::from_utf8(out.stdout).unwrap();
        for method in ["eriksen", "eriksenalt", "exactcase", "stepwise", "weakfield"] {
            assert!(text.contains(method), "{sub}: {method}");
        }
        assert!(text.contains("--methods") && text.contains("--tol"));
    }
    assert_eq!(code(&fwlab(&["--version"])), 0);
}

#[test]
fn gaussian_lattice_runs() {
    let out = fwlab(&["lattice", "--n", "32", "--L", "8", "--mass", "1", "--potential", "gaussian:0.1,1.0", "--methods", "eriksen,stepwise,weakfield"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn constant_potential_exact_case_agrees() {
    let out = fwlab(&["lattice", "--n", "16", "--L", "8", "--mass", "1", "--potential", "constant:0.2", "--methods", "eriksen,exactcase"]);
    assert_eq!(code(&out), 0);
    assert!(cross(&json(&out)).iter().all(|&x| x <= 1e-10));
}

#[test]
fn method_failure_exits_two() {
    let out = fwlab(&["lattice", "--n", "16", "--L", "8", "--mass", "1", "--potential", "gaussian:0.1,1.0", "--methods", "exactcase"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["rows"][0]["error"]["kind"], "NotCommuting");
}

#[test]
fn matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let beta = dir.path().join("beta.mat");
    std::fs::write(&beta, "2 1\n1+0j 0+0j\n0+0j -1+0j\n").unwrap();
    let out = fwlab(&["matrix", "--file", beta.to_str().unwrap(), "--mass", "1"]);
    assert_eq!(code(&out), 0);
    for row in json(&out)["rows"].as_array().unwrap() {
        assert_eq!(row["diagnostics"]["block_diagonality"].as_f64(), Some(0.0));
    }

    let bad = dir.path().join("bad.mat");
    std::fs::write(&bad, "two 1\n").unwrap();
    let out = fwlab(&["matrix", "--file", bad.to_str().unwrap(), "--mass", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ParseError"));
}

#[test]
fn saved_lattice_matches_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("h.mat");
    let direct = dir.path().join("direct.json");
    let lattice = ["lattice", "--n", "16", "--L", "4", "--mass", "1", "--potential", "step:0.3,0.5", "--methods", "eriksen,eriksenalt,stepwise,weakfield"];
    let mut args = lattice.to_vec();
    args.extend(["--save-matrix", mat.to_str().unwrap(), "--out", direct.to_str().unwrap()]);
    assert_eq!(code(&fwlab(&args)), 0);
    let out = fwlab(&["matrix", "--file", mat.to_str().unwrap(), "--mass", "1", "--methods", "eriksen,eriksenalt,stepwise,weakfield"]);
    assert_eq!(code(&out), 0);
    let a = read_json(&direct);
    let b = json(&out);
    for (ra, rb) in a["rows"].as_array().unwrap().iter().zip(b["rows"].as_array().unwrap()) {
        for (k, v) in ra["diagnostics"].as_object().unwrap() {
            if let (Some(x), Some(y)) = (v.as_f64(), rb["diagnostics"][k].as_f64()) {
                assert!((x - y).abs() <= 1e-14, "{k}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for (p, threads) in paths.iter().zip(["1", "4"]) {
        let out = Command::new(env!("CARGO_BIN_EXE_fwlab"))
            .args(["lattice", "--n", "16", "--L", "4", "--mass", "1", "--potential", "gaussian:0.2,1", "--seed", "7", "--out", p.to_str().unwrap()])
            .env("FWLAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 2, "exactcase declines a non-commuting model");
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn csv_output() {
    let out = fwlab(&["free", "--mass", "1", "--p", "0.1,0.2,0.3", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("method,metric,value,status\n"));
    assert_eq!(text.lines().count(), 26);
}

#[test]
fn sweep_writes_reports_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let out = fwlab(&[
        "sweep", "--n", "32", "--L", "8", "--mass", "1", "--potential", "gaussian:0.1,1.0",
        "--methods", "eriksen,stepwise,weakfield", "--param", "g", "--values", "0.2,0.1,0.05",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    for v in ["0.2", "0.1", "0.05"] {
        assert!(out_dir.join(format!("g_{v}.json")).exists());
    }
    let summary = read_json(&out_dir.join("summary.json"));
    assert_eq!(summary["weak_field_orders"].as_array().unwrap().len(), 2);
    assert_eq!(summary["stepwise_orders"].as_array().unwrap().len(), 2);
}

#[test]
fn single_value_sweep_has_no_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwlab(&[
        "sweep", "--n", "16", "--L", "8", "--mass", "1", "--potential", "gaussian:0.1,1.0",
        "--values", "0.1", "--methods", "eriksen,weakfield", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = read_json(&dir.path().join("summary.json"));
    assert!(summary["weak_field_orders"].as_array().unwrap().is_empty());
}

#[test]
fn strong_field_sweep_flags_stagnation() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwlab(&[
        "sweep", "--n", "32", "--L", "4", "--mass", "1", "--potential", "gaussian:0.1,1.0",
        "--values", "0.8,0.1", "--methods", "stepwise", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary["stagnation"], true);
    assert_eq!(summary["stepwise_stop_reasons"][0], "stagnation");
}

#[test]
fn sweep_rejects_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = fwlab(&[
        "sweep", "--n", "16", "--L", "8", "--mass", "1", "--potential", "gaussian:0.1,1.0",
        "--values", "0.1,-0.2", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}
