use std::process::{Command, Output};

use lorentz_lab::concave::ConcaveFn;
use lorentz_lab::optimal_range::psi_from_phi;
use serde_json::Value;

const SQRT: &str = r#"{"kind":"power","alpha":0.5}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorentz-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn strip_timing(v: &mut Value) {
    if let Value::Array(items) = v {
        for r in items {
            r.as_object_mut().unwrap().remove("ms");
        }
    }
}

#[test]
fn psi_at_one_matches_closed_form() {
    let out = run(&["psi", "--phi", SQRT, "--u", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let row = &v["rows"][0];
    let want = 0.5 * 0.5f64.exp();
    assert!((row["psi"].as_f64().unwrap() - want).abs() < 1e-9);
    assert!((row["w_star"].as_f64().unwrap() - std::f64::consts::E).abs() < 1e-6);
    assert_eq!(row["u"].as_f64(), Some(1.0));
}

#[test]
fn psi_output_is_the_library_value_at_twelve_digits() {
    let out = run(&["psi", "--phi", r#"{"kind":"log1p"}"#, "--u", "0.37"]);
    let got = json(&out)["rows"][0]["psi"].as_f64().unwrap();
    let (psi, _) = psi_from_phi(&ConcaveFn::Log1p, 0.37);
    assert_eq!(got, format!("{psi:.11e}").parse::<f64>().unwrap());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["psi", "--phi", SQRT, "--u", "0"])), 2);
    assert_eq!(code(&run(&["psi", "--u", "1"])), 2);
    assert_eq!(
        code(&run(&[
            "psi",
            "--phi",
            r#"{"kind":"power","alpha":2}"#,
            "--u",
            "1"
        ])),
        2
    );
    assert_eq!(code(&run(&["psi", "--phi", "{not json"])), 2);
    assert_eq!(code(&run(&["psi", "--bogus"])), 2);
    assert_eq!(
        code(&run(&[
            "hilbert",
            "--x",
            r#"{"layers":[[1,1]]}"#,
            "--t",
            "1"
        ])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn psi_csv_header() {
    let out = run(&[
        "psi",
        "--phi",
        SQRT,
        "--format",
        "csv",
        "--decades",
        "2",
        "--points",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u,psi,w_star");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.1,"));
}

#[test]
fn numbers_carry_at_most_twelve_significant_digits() {
    let out = run(&["psi", "--phi", SQRT, "--format", "csv", "--points", "9"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        for cell in line.split(',') {
            let mantissa = cell.split('e').next().unwrap();
            let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
            let significant = digits.trim_start_matches('0').trim_end_matches('0');
            assert!(significant.len() <= 12, "{cell}");
        }
    }
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        format!(r#"{{"phi": {SQRT}, "u": 4, "format": "csv"}}"#),
    )
    .unwrap();
    let out = run(&["psi", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(row[0], 4.0);
    assert!((row[1] - 2.0 * 0.5 * 0.5f64.exp()).abs() < 1e-9);

    let out = run(&[
        "psi",
        "--config",
        cfg.to_str().unwrap(),
        "--u",
        "9",
        "--format",
        "json",
    ]);
    assert_eq!(json(&out)["rows"][0]["u"].as_f64(), Some(9.0));
}

#[test]
fn phi_from_file_and_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let phi = dir.path().join("phi.json");
    std::fs::write(&phi, SQRT).unwrap();
    let dest = dir.path().join("out.csv");
    let out = run(&[
        "psi",
        "--phi",
        phi.to_str().unwrap(),
        "--u",
        "1",
        "--format",
        "csv",
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&dest).unwrap();
    assert!(text.starts_with("u,psi,w_star\n1,0.82436063535,"));
}

#[test]
fn criterion_verdicts_map_to_exit_codes() {
    let out = run(&["check-continuous", "--phi", SQRT, "--points", "17"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "bounded_with_c");
    // G/φ = e^{1-α}/(1-α) = 2√e for the exact ψ; the tabulated ψ is close
    assert!((v["c_estimate"].as_f64().unwrap() - 2.0 * 0.5f64.exp()).abs() < 1e-3);

    let linear = r#"{"kind":"power","alpha":1}"#;
    let out = run(&["check-continuous", "--phi", linear, "--psi", linear]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["verdict"], "tail_divergent");

    let out = run(&["check-discrete", "--phi", linear, "--n", "256"]);
    assert_eq!(code(&out), 1);

    let out = run(&[
        "check-discrete",
        "--phi",
        SQRT,
        "--n",
        "256",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("n,G,phi,ratio\n"));
}

#[test]
fn continuous_check_needs_eight_decades() {
    assert_eq!(
        code(&run(&["check-continuous", "--phi", SQRT, "--decades", "4"])),
        2
    );
}

#[test]
fn witnesses_pass() {
    let out = run(&["witness", "--phi", SQRT, "--u", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["norm"].as_f64().unwrap() <= 2.0 * v["psi_u"].as_f64().unwrap());

    let out = run(&[
        "witness",
        "--phi",
        SQRT,
        "--x",
        r#"{"layers":[[1,2],[3,0.5]]}"#,
    ]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["ratio"].as_f64().unwrap() <= 8.0);
}

#[test]
fn hilbert_value_and_domination() {
    let out = run(&["hilbert", "--x", r#"{"layers":[[1,1]]}"#, "--t", "-1"]);
    assert_eq!(code(&out), 0);
    // H χ_(0,1)(-1) = -(1/π) ln 2
    let want = -(2f64.ln()) / std::f64::consts::PI;
    assert!((json(&out)["value"].as_f64().unwrap() - want).abs() < 1e-11);

    let out = run(&["hilbert", "--x", r#"{"layers":[[1,1],[2,0.25]]}"#]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn phi0_check_indicator_and_corpus() {
    let out = run(&["phi0-check", "--x", r#"{"layers":[[1,1]]}"#]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["s_norm"].as_f64(), Some(2.0));
    assert_eq!(v["phi0_norm"].as_f64(), Some(2.0));

    let out = run(&[
        "phi0-check",
        "--samples",
        "10",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 11);
}

#[test]
fn truncation_of_diagonal_is_zero() {
    let m = r#"{"n":2,"re":[[1,0],[0,2]],"im":[[0,0],[0,0]]}"#;
    let out = run(&["truncate", "--matrix", m]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["s2_truncated"].as_f64(), Some(0.0));

    let out = run(&["truncate", "--dim", "6", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["s2_truncated"].as_f64().unwrap() <= v["s2_input"].as_f64().unwrap());
}

#[test]
fn doi_identity_holds() {
    let out = run(&["doi", "--dim", "5", "--seed", "11"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["deviation"].as_f64().unwrap() <= 1e-10 * v["scale"].as_f64().unwrap());

    let a = r#"{"n":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]],"hermitian":true}"#;
    assert_eq!(code(&run(&["doi", "--a", a])), 2);
}

#[test]
fn suite_is_deterministic_across_modes() {
    let args = ["suite", "--seed", "42", "--samples", "20"];
    let a = run(&args);
    let b = run(&args);
    let mut serial_args = args.to_vec();
    serial_args.push("--serial");
    let c = run(&serial_args);
    for o in [&a, &b, &c] {
        assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (mut va, mut vb, mut vc) = (json(&a), json(&b), json(&c));
    strip_timing(&mut va);
    strip_timing(&mut vb);
    strip_timing(&mut vc);
    assert_eq!(va, vb);
    assert_eq!(va, vc);
    assert_eq!(va.as_array().unwrap().len(), 14);
}

#[test]
fn suite_csv_has_sample_rows() {
    let out = run(&["suite", "--samples", "5", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("experiment,sample_id,value,pass\n"));
}
