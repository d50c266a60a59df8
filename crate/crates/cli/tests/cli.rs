use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use waring5::construct::form_from_scheme;
use waring5::json::{decomposition_from_json, decomposition_to_json, scheme_to_json};
use waring5::pipeline::{transformed_sample, PipelineConfig};
use waring5::scalar::Rational;
use waring5::schemes::JetScheme;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_waring5"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn tmp(name: &str, contents: &[u8]) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("waring5-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn construct_matches_golden_file() {
    let out = run(&["construct", "--type", "1:5", "--m", "4", "--d", "9", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = include_str!("golden/construct_1_5_m4_d9_seed7.json");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn construct_unit_points_is_fermat_sum() {
    let out = run(&["construct", "--type", "5:1,1,1,1,1", "--m", "4", "--d", "9", "--unit-coefficients"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["f"], "x0^9 + x1^9 + x2^9 + x3^9 + x4^9");
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        vec!["construct", "--type", "9:1,1,1,1,1,1,1,1,1"],
        vec!["construct", "--type", "1:5", "--d", "8"],
        vec!["construct", "--type", "1:5", "--m", "3"],
        vec!["--precision-bits", "32", "construct", "--type", "1:5"],
        vec!["--coeff-height", "1", "construct", "--type", "1:5"],
        vec!["construct", "--type", "1:5", "--output", "csv"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn classify_sample_and_power() {
    let s = run(&["construct", "--type", "2:3,2", "--d", "9", "--seed", "3"]);
    let out = run_stdin(&["classify"], std::str::from_utf8(&s.stdout).unwrap());
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["rank"], 26);
    assert_eq!(v["type"], "2:3,2");

    let out = run_stdin(&["classify"], "x0^9");
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());

    let out = run_stdin(&["classify", "--d", "10"], "x0^9 + x1^9");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_transformed_sample_from_text() {
    let t = "3:3,1,1".parse().unwrap();
    let sp = transformed_sample(&t, 4, 10, 2, &PipelineConfig::default()).unwrap();
    let path = tmp("f310.txt", sp.f.to_string().as_bytes());
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["rank"], 21);
    assert_eq!(v["type"], "3:3,1,1");
}

#[test]
fn decompose_then_verify() {
    let s = run(&["construct", "--type", "3:2,2,1", "--d", "9", "--seed", "1"]);
    let sample = tmp("s221.json", &s.stdout);
    let out = run(&["decompose", sample.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["terms"].as_array().unwrap().len(), 19);
    // parse-print-parse
    let again = decomposition_to_json(&decomposition_from_json(&v).unwrap());
    assert_eq!(again, v);

    let dec = tmp("d221.json", &out.stdout);
    let out = run(&[
        "verify",
        "--form",
        sample.to_str().unwrap(),
        "--decomposition",
        dec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["ok"], true);

    let mut broken = v.clone();
    broken["terms"].as_array_mut().unwrap().pop();
    let dec = tmp("d221-broken.json", broken.to_string().as_bytes());
    let out = run(&[
        "verify",
        "--form",
        sample.to_str().unwrap(),
        "--decomposition",
        dec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["ok"], false);
}

#[test]
fn decompose_bare_form() {
    let out = run_stdin(&["decompose"], "x0^9 + x1^9 + x2^9 + x3^9 + 2*x4^9");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["terms"].as_array().unwrap().len(), 5);
}

#[test]
fn pipeline_examples() {
    let out = run(&["pipeline", "--type", "4:2,1,1,1", "--d", "9", "--m", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["decomposition"]["terms"].as_array().unwrap().len(), 12);

    let out = run(&["pipeline", "--type", "5:1,1,1,1,1", "--d", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["decomposition"]["terms"].as_array().unwrap().len(), 5);

    let out = run(&["pipeline", "--type", "1:5", "--d", "9", "--rational-only"]);
    match out.status.code() {
        Some(0) => assert_eq!(json_of(&out)["decomposition"]["terms"].as_array().unwrap().len(), 33),
        Some(4) => assert!(out.stdout.is_empty()),
        c => panic!("unexpected exit {c:?}"),
    }
}

#[test]
fn output_is_deterministic() {
    let a = run(&["pipeline", "--type", "3:3,1,1", "--seed", "11"]);
    let b = run(&["pipeline", "--type", "3:3,1,1", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn stratum_sweep_csv_matches_golden_file() {
    let out = run(&["stratum-dim", "--sweep", "--m", "4", "--d", "9", "--trials", "1", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        include_str!("golden/stratum_m4_d9.csv")
    );
}

#[test]
fn hilbert_sylvester_and_curve_witness() {
    let s = run(&["construct", "--type", "2:4,1", "--seed", "2"]);
    let out = run_stdin(&["hilbert", "--d", "9"], std::str::from_utf8(&s.stdout).unwrap());
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["h1"], 0);
    assert_eq!(v["h0"], 715 - 5);

    let out = run_stdin(&["sylvester"], "x0^8*x1");
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["rank"], 9);
    assert_eq!(v["decomposition"]["terms"].as_array().unwrap().len(), 9);

    let pts = r#"[["1","0","0"],["0","1","0"],["1","1","0"],["2","1","0"],["3","1","0"]]"#;
    let out = run_stdin(&["curve-witness", "--d", "3"], pts);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["witness"]["kind"], "line");
    assert_eq!(v["witness"]["count"], 5);

    let generic = r#"{"points": [["1","0","0"],["0","1","0"],["0","0","1"],["1","1","1"]]}"#;
    let out = run_stdin(&["curve-witness", "--d", "3"], generic);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out)["witness"].is_null());
}

#[test]
fn plane_bound_on_conic() {
    // five points on x0*x2 = x1^2
    let pts: Vec<Vec<Rational>> = [0i64, 1, 2, 3, -1]
        .iter()
        .map(|&t| vec![Rational::from(1), Rational::from(t), Rational::from(t * t)])
        .collect();
    let a = JetScheme::from_points(2, &pts).unwrap();
    let coeffs: Vec<Vec<Rational>> = (1..=5).map(|i| vec![Rational::from(i)]).collect();
    let f = form_from_scheme(&a, 9, &coeffs).unwrap();
    let mut v = scheme_to_json(&a);
    v["f"] = Value::String(f.to_string());
    let out = run_stdin(&["plane-bound"], &v.to_string());
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["bound"], 18);
    assert_eq!(v["curve_kind"], "smooth_conic");
}

#[test]
fn text_output() {
    let out = run(&["--output", "text", "stratum-dim", "--type", "1:5", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("projective_dimension: 20"));
}
