use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lagspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagspec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn line_file(dir: &Path, name: &str, slope: f64) -> PathBuf {
    write(dir, name, &format!(r#"{{"X": [[1]], "Y": [[{slope}]]}}"#))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn value(out: &str, key: &str) -> i64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.trim().strip_prefix('=')).map(|v| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("{key} missing in {out}"))
}

fn csv_rows(out: &str) -> Vec<Vec<f64>> {
    out.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn index_of_three_lines() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (line_file(dir.path(), "a.json", 0.0), line_file(dir.path(), "b.json", 1.0), line_file(dir.path(), "c.json", 2.0));
    let o = lagspec(&["index", s(&a), s(&b), s(&c)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("0"));
    assert_eq!(value(&out, "iD(L2,L1,L3)"), 1);

    let o = lagspec(&["index", s(&a), s(&a), s(&a)]);
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("0"));
    assert_eq!(value(&out, "dim(L1∩L2)"), 1);
}

#[test]
fn index_periodic_delta_vertical() {
    let dir = tempfile::tempdir().unwrap();
    let per = write(dir.path(), "per.json", r#"{"X": [[1,0],[1,0]], "Y": [[0,1],[0,-1]]}"#);
    let delta = write(dir.path(), "delta.json", r#"{"X": [[1,0],[1,0]], "Y": [[1,1],[0,-1]]}"#);
    let vert = write(dir.path(), "v.json", r#"{"P": [[0,0],[0,0]], "Theta": [[0,0],[0,0]]}"#);
    let out = stdout(&lagspec(&["index", s(&per), s(&delta), s(&vert)]));
    assert_eq!(out.lines().next(), Some("0"));
    assert_eq!(value(&out, "iD(L2,L1,L3)"), 1);
}

#[test]
fn malformed_plane_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"X": [[1,0]], "Y": "#);
    let a = line_file(dir.path(), "a.json", 0.0);
    assert_eq!(lagspec(&["index", s(&bad), s(&a), s(&a)]).status.code(), Some(2));
    let two = write(dir.path(), "two.json", r#"{"X": [[1,0],[0,1]], "Y": [[0,0],[0,0]]}"#);
    assert_eq!(lagspec(&["index", s(&two), s(&a), s(&a)]).status.code(), Some(2));
    let not_lagrangian = write(dir.path(), "nl.json", r#"{"X": [[1,0],[0,1]], "Y": [[0,1],[0,0]]}"#);
    assert_eq!(lagspec(&["index", s(&not_lagrangian), s(&two), s(&two)]).status.code(), Some(2));
}

#[test]
fn spectrum_catalog_examples() {
    let pi = std::f64::consts::PI.to_string();
    let o = lagspec(&["spectrum", "--bc", "dirichlet", "--len", &pi, "--window", "0.5", "10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("lambda,multiplicity\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    for (r, want) in rows.iter().zip([1.0, 4.0, 9.0]) {
        assert!((r[0] - want).abs() < 1e-8 && r[1] == 1.0);
    }
    let rows = csv_rows(&stdout(&lagspec(&["spectrum", "--bc", "neumann", "--len", &pi, "--window", "-0.5", "10"])));
    assert_eq!(rows.len(), 4);
    assert!(rows[0][0].abs() < 1e-8);
    let rows = csv_rows(&stdout(&lagspec(&["spectrum", "--bc", "periodic", "--window", "1", "50"])));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][0] - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-8 && rows[0][1] == 2.0);
}

#[test]
fn spectrum_with_potential_file_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "q.csv", "x,q\n0,2\n1,2\n");
    let out_path = dir.path().join("spec.csv");
    let o = lagspec(&["spectrum", "--bc", "dirichlet", "--potential", s(&q), "--window", "0", "30", "--output", s(&out_path)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let rows = csv_rows(&std::fs::read_to_string(&out_path).unwrap());
    assert!((rows[0][0] - (std::f64::consts::PI.powi(2) + 2.0)).abs() < 1e-7);
    let bad = write(dir.path(), "bad.csv", "x,q\n0,1\n0.5,1\n");
    assert_eq!(lagspec(&["spectrum", "--bc", "dirichlet", "--potential", s(&bad), "--window", "0", "30"]).status.code(), Some(2));
}

#[test]
fn config_errors() {
    assert_eq!(lagspec(&["spectrum", "--bc", "robin", "--window", "0", "1"]).status.code(), Some(2));
    assert_eq!(lagspec(&["spectrum", "--bc", "dirichlet", "--window", "2", "1"]).status.code(), Some(2));
    assert_eq!(lagspec(&["spectrum", "--bc", "dirichlet", "--len", "-1", "--window", "0", "1"]).status.code(), Some(2));
    assert_eq!(lagspec(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(lagspec(&["--root-tol", "-1", "verify", "--suite", "krein", "--trials", "1"]).status.code(), Some(2));
}

#[test]
fn shift_examples() {
    let o = lagspec(&["shift", "--bc1", "periodic", "--bc2", "antiperiodic", "--lambda", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!((value(&out, "sigma_minus"), value(&out, "sigma_plus")), (1, 1));
    assert!(value(&out, "shift_direct").abs() <= 1);
    assert!(out.contains("bound: PASS"));

    let out = stdout(&lagspec(&["shift", "--bc1", "delta", "--s1", "2", "--bc2", "delta", "--s2", "2", "--lambda", "7"]));
    assert_eq!(value(&out, "shift_direct"), 0);
    assert_eq!(value(&out, "shift_predicted"), 0);

    let pi = std::f64::consts::PI.to_string();
    let out = stdout(&lagspec(&["shift", "--bc1", "neumann", "--bc2", "dirichlet", "--len", &pi, "--lambda", "0.5"]));
    assert_eq!(value(&out, "shift_direct"), 1);
    assert_eq!(value(&out, "shift_predicted"), 1);
    assert_eq!((value(&out, "sigma_minus"), value(&out, "sigma_plus")), (0, 2));
    assert!(out.contains("bound: PASS"));

    // On an eigenvalue both one-sided values are reported.
    let out = stdout(&lagspec(&["shift", "--bc1", "neumann", "--bc2", "dirichlet", "--len", &pi, "--lambda", "4"]));
    assert_eq!(value(&out, "shift_direct_left"), value(&out, "shift_predicted_left"));
}

#[test]
fn verify_suites_exit_zero_and_are_deterministic() {
    let args = ["--seed", "11", "verify", "--suite", "identities", "--trials", "30", "--n-max", "3"];
    let a = lagspec(&args);
    assert_eq!(a.status.code(), Some(0));
    let b = lagspec(&args);
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["failures"], 0);
    assert_eq!(report["reports"]["n=2"]["cocycle"]["trials"], 30);

    for suite in ["limits", "krein", "hormander"] {
        let o = lagspec(&["--seed", "3", "verify", "--suite", suite, "--trials", "10", "--n-max", "3"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
    }
    let o = lagspec(&["--seed", "5", "verify", "--suite", "models", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn sweep_delta_prime() {
    let o = lagspec(&["sweep", "--family", "delta_prime", "--grid", "-3", "3", "6", "--kmax", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("s,lambda_1,lambda_2,lambda_3,lambda_4,lambda_5\n"));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 7);
    let pi2 = std::f64::consts::PI.powi(2);
    for r in &rows {
        assert!((r[2] - pi2).abs() < 1e-6);
        assert!((r[4] - 9.0 * pi2).abs() < 1e-6);
    }
    let zero = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((zero[1] - pi2).abs() < 1e-6 && (zero[3] - 9.0 * pi2).abs() < 1e-6 && (zero[5] - 25.0 * pi2).abs() < 1e-6);
    assert_eq!(lagspec(&["sweep", "--family", "neumann", "--grid", "0", "1", "2"]).status.code(), Some(2));
}

#[test]
fn sweep_delta_family_crosses_zero() {
    let out = stdout(&lagspec(&["sweep", "--family", "delta", "--grid", "-5", "5", "10", "--kmax", "2"]));
    let rows = csv_rows(&out);
    // λ₁ < 0 exactly when s < 0: the Morse index flips at s = 0.
    for r in &rows {
        if r[0] < 0.0 {
            assert!(r[1] < 0.0);
        } else {
            assert!(r[1] >= -1e-9);
        }
    }
}
