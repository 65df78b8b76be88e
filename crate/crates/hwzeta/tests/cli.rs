//! Black-box tests of the `hwzeta` binary: output formats, exit
//! codes, and cross-run determinism of the JSON emitters.

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn write_instance(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().expect("tempfile");
    f.write_all(text.as_bytes()).expect("write");
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwzeta"))
        .args(args)
        .output()
        .expect("spawn hwzeta")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

const FERMAT_CUBIC: &str = r#"{
  "p": PPP, "a": 1, "n": 2, "d": 3,
  "terms": [
    {"exponents": [3, 0, 0], "coeff": "1"},
    {"exponents": [0, 3, 0], "coeff": "1"},
    {"exponents": [0, 0, 3], "coeff": "1"}
  ]
}"#;

const TWO_LINES_F3: &str = r#"{
  "p": 3, "a": 1, "n": 2, "d": 2,
  "terms": [{"exponents": [0, 1, 1], "coeff": "1"}]
}"#;

fn fermat(p: u64) -> NamedTempFile {
    write_instance(&FERMAT_CUBIC.replace("PPP", &p.to_string()))
}

#[test]
fn matrix_prints_the_ordinary_fermat_factor() {
    let f = fermat(7);
    let out = run(&["matrix", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("A[0][0]"), "missing matrix entry: {text}");
    assert!(
        text.contains("det(I - tM) = 1 + t"),
        "unexpected det line: {text}"
    );
}

#[test]
fn zeta_emits_exact_point_counts() {
    let f = fermat(2);
    let out = run(&["zeta", f.path().to_str().unwrap(), "--series-order", "5"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for line in ["N_1 = 3", "N_2 = 9", "N_3 = 9", "N_4 = 9", "N_5 = 33"] {
        assert!(text.contains(line), "missing {line:?} in: {text}");
    }
    assert!(text.contains("mod 2: 1"), "reduced series should be 1: {text}");
}

#[test]
fn verify_all_passes_on_the_two_lines_instance() {
    let f = write_instance(TWO_LINES_F3);
    let out = run(&["verify", f.path().to_str().unwrap(), "--check", "all"]);
    assert!(out.status.success(), "verify failed: {}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn malformed_instance_exits_2() {
    let f = write_instance("{ not json");
    let out = run(&["zeta", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn inhomogeneous_instance_exits_2() {
    let f = write_instance(
        r#"{"p": 3, "a": 1, "n": 2, "d": 2,
            "terms": [{"exponents": [1, 0, 0], "coeff": "1"}]}"#,
    );
    let out = run(&["matrix", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_congruence_variant_exits_2() {
    // d | n, so --check main must be rejected as a usage error
    let f = write_instance(TWO_LINES_F3);
    let out = run(&["verify", f.path().to_str().unwrap(), "--check", "main"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invertibility_subcommand_runs_the_grid_cell() {
    let out = run(&[
        "invertibility", "--n", "2", "--d", "2", "--p", "3", "--json",
    ]);
    assert!(out.status.success(), "stdout: {}", stdout_of(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("json output");
    let reports = parsed.as_array().expect("array of reports");
    assert!(!reports.is_empty());
    for r in reports {
        assert_eq!(r["pass"], serde_json::Value::Bool(true), "{r}");
    }
}

#[test]
fn json_outputs_are_deterministic() {
    let f = fermat(5);
    let path = f.path().to_str().unwrap();
    let a = run(&["zeta", path, "--series-order", "4", "--json"]);
    let b = run(&["zeta", path, "--series-order", "4", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
