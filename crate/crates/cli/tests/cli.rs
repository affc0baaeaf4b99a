use std::io::Write;
use std::process::{Command, Output, Stdio};

use tempfile::NamedTempFile;

const C5: &str = r#"{"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[4,0]]}"#;

const QUADRATIC: &str = r#"{"domain":{"kind":"simplex","n":2},
  "p":{"n":2,"terms":[{"exp":[2,0],"coef":"1"},{"exp":[0,2],"coef":"1"},{"exp":[1,1],"coef":"-1"}]}}"#;

fn input(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn gmp(args: &[&str], file: &NamedTempFile) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmp"))
        .args(args)
        .arg("--input")
        .arg(file.path())
        .env_remove("GMP_TOL")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn json_sweep_over_a_range() {
    let f = input(QUADRATIC);
    let out = gmp(&["minimize", "--levels", "2..4", "--format", "json"], &f);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 3);
    for (item, r) in items.iter().zip(2..) {
        assert_eq!(item["level"], r);
        assert_eq!(item["status"], "optimal");
        assert!(item["bound"].is_string());
    }
    // The level-r bound is monotone and stays below the true minimum 1/4.
    let bounds: Vec<f64> = items.iter().map(|i| i["bound"].as_str().unwrap().parse().unwrap()).collect();
    assert!(bounds.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    assert!(bounds.iter().all(|&b| b <= 0.25 + 1e-9));
}

#[test]
fn stable_set_reports_alpha_bound() {
    let f = input(C5);
    let out = gmp(&["stable-set", "--levels", "5", "--format", "json", "--oracle"], &f);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let extras = &v[0]["extras"];
    let alpha: f64 = extras["alpha_upper_bound"].as_str().unwrap().parse().unwrap();
    assert!((alpha - 2.5).abs() < 1e-6, "{alpha}");
    assert_eq!(extras["alpha_exhaustive"], "2");
}

#[test]
fn malformed_exponent_is_a_schema_error() {
    let f = input(
        r#"{"domain":{"kind":"simplex","n":2},"p":{"n":2,"terms":[{"exp":[2,0,1],"coef":"1"}]}}"#,
    );
    let out = gmp(&["minimize"], &f);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("$.p.terms[0].exp"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn out_of_range_tolerance_is_rejected() {
    let f = input(QUADRATIC);
    for tol in ["0", "0.5", "-1e-8"] {
        let out = gmp(&["minimize", &format!("--tol={tol}")], &f);
        assert_eq!(out.status.code(), Some(4), "tol {tol}");
    }
}

#[test]
fn level_below_minimum_fails_before_output() {
    let f = input(QUADRATIC);
    let out = gmp(&["minimize", "--levels", "1..3", "--format", "json"], &f);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
    let out = gmp(&["stable-set", "--levels", "1"], &input(C5));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gmp"))
        .args(["stable-set", "--input", "-", "--levels", "3", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(C5.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)[0]["level"], 3);
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let f = input(C5);
    let args = ["stable-set", "--levels", "2..4", "--format", "json"];
    let a = gmp(&args, &f);
    let b = gmp(&args, &f);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let again = serde_json::to_value(serde_json::from_value::<Vec<serde_json::Value>>(v.clone()).unwrap()).unwrap();
    assert_eq!(v, again);
}

#[test]
fn parallel_levels_match_sequential() {
    let f = input(C5);
    let seq = gmp(&["stable-set", "--levels", "2..5", "--format", "json"], &f);
    let par = gmp(&["stable-set", "--levels", "2..5", "--format", "json", "--parallel-levels"], &f);
    assert_eq!(seq.status.code(), Some(0));
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn infeasible_instance_exits_two() {
    let f = input(
        r#"{"domain":{"kind":"simplex","n":2},
            "objective":{"n":2,"terms":[{"exp":[1,0],"coef":"1"}]},
            "constraints":[
              {"poly":{"n":2,"terms":[{"exp":[1,0],"coef":"1"},{"exp":[0,1],"coef":"1"}]},"rhs":"1"},
              {"poly":{"n":2,"terms":[{"exp":[1,0],"coef":"1"}]},"rhs":"2"}]}"#,
    );
    let out = gmp(&["solve", "--levels", "1..2", "--format", "json"], &f);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert!(v.as_array().unwrap().iter().all(|i| i["status"] == "infeasible"));
}

#[test]
fn sphere_cubature_via_sdp() {
    let f = input(r#"{"domain":{"kind":"sphere","n":2},"d":2,"beta":[4,0]}"#);
    let out = gmp(&["cubature", "--levels", "2", "--format", "json"], &f);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["hierarchy"], "sdp");
    let b: f64 = v[0]["bound"].as_str().unwrap().parse().unwrap();
    assert!((b - 0.25).abs() < 1e-6, "{b}");
}

#[test]
fn polya_certificate_is_nonnegative() {
    let f = input(
        r#"{"f":{"n":2,"terms":[{"exp":[2,0],"coef":"1"},{"exp":[0,2],"coef":"1"},{"exp":[1,1],"coef":"-1"}]},"eps":"1/4"}"#,
    );
    let out = gmp(&["polya-certificate", "--format", "json"], &f);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["nonnegative"], true);
    assert_eq!(v["eps"], "1/4");
    let k = v["exponent"].as_u64().unwrap();
    assert_eq!(v["shifted"]["terms"].as_array().unwrap().len() as u64, k + 3);
}

#[test]
fn equivalence_check_agrees() {
    let f = input(
        r#"{"p":{"n":3,"terms":[{"exp":[2,0,0],"coef":"1"},{"exp":[0,1,1],"coef":"-2"},{"exp":[0,0,2],"coef":"1/2"}]}}"#,
    );
    let out = gmp(&["equiv-check", "--levels", "0..3", "--format", "json"], &f);
    assert_eq!(out.status.code(), Some(0));
    for item in json(&out).as_array().unwrap() {
        let d: f64 = item["difference"].as_str().unwrap().parse().unwrap();
        assert!(d <= 1e-7, "{item}");
    }
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_gmp"))
        .args(["minimize", "--input", "/nonexistent/in.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
