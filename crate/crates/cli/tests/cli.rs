use std::process::{Command, Output};

use serde_json::Value;

fn gls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gls")).args(args).output().expect("run gls")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn constants_text_and_domain_error() {
    let out = gls(&["constants", "--n", "5", "--p", "2", "--format", "text", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("k_hr: 0.8\n"), "{text}");

    let out = gls(&["constants", "--n", "5", "--p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("outside (1, n/2)"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
}

#[test]
fn constants_with_beta() {
    let out = gls(&["constants", "--n", "4", "--p", "2", "--beta", "1", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["k_s"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["riesz_reciprocal"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(v.get("k_hr").is_none());
}

#[test]
fn missing_flag_is_usage_error() {
    let out = gls(&["lpnorm", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("needs --p"));
    let out = gls(&["constants", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lpnorm_matches_closed_form() {
    let out = gls(&["lpnorm", "--n", "4", "--p", "1.1", "--f", "gaussian(2)", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["rel_error"].as_f64().unwrap() < 1e-10);
    let spec = r#"{"kind": "ball_indicator", "radius": 2.0}"#;
    let out = gls(&["lpnorm", "--n", "3", "--p", "2", "--f", spec, "--no-timestamp"]);
    let v = json(&out);
    assert!(v["rel_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn envelope_sweep_equals_closed_form() {
    let out = gls(&["sweep", "--n", "4", "--points", "100", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with(&format!("# gls {}", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("points = 100"));
    let (header, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 100);
    let (e, c) = (column(&header, "envelope"), column(&header, "closed_form"));
    for r in &rows {
        assert!((r[e] - r[c]).abs() < 1e-12);
    }
    let idx: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert!(idx.windows(2).all(|w| w[1] == w[0] + 1.0));
}

#[test]
fn ks_against_khr_sweep() {
    let out = gls(&["sweep", "--n", "7", "--kind", "ks-vs-khr", "--points", "200", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["max_abs_diff"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["rows"].as_array().unwrap().len(), 200);
}

#[test]
fn grid_limits() {
    assert_eq!(gls(&["sweep", "--n", "4", "--points", "0"]).status.code(), Some(2));
    assert_eq!(gls(&["sweep", "--n", "4", "--points", "1000001"]).status.code(), Some(2));
}

#[test]
fn verify_hr_report_schema() {
    let out = gls(&["verify-hr", "--f", "gaussian", "--n", "5", "--psi", "natural", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["theorem"], "hardy_rellich");
    assert_eq!(v["n"], 5);
    assert!(v.get("timestamp").is_none());
    let iv = v["interval"].as_array().unwrap();
    assert_eq!((iv[0].as_f64(), iv[1].as_f64()), (Some(1.0), Some(2.5)));
    let ratio = v["ratio"].as_f64().unwrap();
    assert!(ratio > 0.0 && ratio <= 1.0);
    assert_eq!(v["passed"], true);
    assert!(v["argmax_p"].as_f64().is_some());
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 129);
    for s in samples {
        for key in ["p", "lhs_p", "rhs_p", "margin"] {
            assert!(s[key].as_f64().is_some(), "sample without {key}");
        }
    }
    let prov = &v["provenance"];
    assert!(prov["quadrature"]["rel_tol"].as_f64().is_some());
    assert_eq!(prov["sup_grid"]["points"], 129);
    assert_eq!(prov["psi"]["kind"], "natural");
    assert_eq!(v["constant"], "K_HR");
}

#[test]
fn failed_check_exits_one() {
    let out = gls(&["verify-hr", "--n", "5", "--psi", "power(1,1)", "--tol=-0.9", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn non_convergence_exits_three() {
    // the transform of a discontinuous profile decays too slowly
    let out = gls(&["verify-sobolev", "--n", "3", "--beta", "1", "--f", "ball", "--psi", "unit"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_sobolev_given_g() {
    let out = gls(&["verify-sobolev", "--n", "4", "--beta", "1", "--f", "gaussian", "--given", "g", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["theorem"], "weighted_sobolev");
    assert_eq!(v["given"], "g");
    assert_eq!(v["beta"], 1.0);
    assert_eq!(v["constant"], "K_W read as K_S");
    assert!(v["ratio"].as_f64().unwrap() <= 1.0 + 1e-4);
    assert!(v["provenance"]["hankel"]["output_radii"].as_u64().unwrap() > 0);
}

#[test]
fn glsnorm_natural_is_one() {
    let out = gls(&["glsnorm", "--n", "3", "--f", "gaussian(0.5)", "--psi", "natural", "--a", "1", "--b", "4", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let out = gls(&["glsnorm", "--n", "3", "--psi", "degenerate(2)", "--a", "1", "--b", "4", "--no-timestamp"]);
    let v = json(&out);
    let want = (std::f64::consts::PI / 2.0).powf(0.75);
    assert!((v["value"].as_f64().unwrap() / want - 1.0).abs() < 1e-10);
}

#[test]
fn psi_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    std::fs::write(&path, r#"{"kind": "power", "a": 1.0, "b": 2.5, "beta": 1.0, "gamma": 1.0}"#).unwrap();
    let a = gls(&["verify-hr", "--n", "5", "--psi", path.to_str().unwrap(), "--no-timestamp"]);
    let b = gls(&["verify-hr", "--n", "5", "--psi", "power(1,1)", "--no-timestamp"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["ratio"], json(&b)["ratio"]);
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": 6, "p": 2.0, "no-timestamp": true}"#).unwrap();
    let out = gls(&["constants", "--config", cfg.to_str().unwrap()]);
    let v = json(&out);
    assert!((v["k_hr"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let out = gls(&["constants", "--config", cfg.to_str().unwrap(), "--n", "5"]);
    let v = json(&out);
    assert!((v["k_hr"].as_f64().unwrap() - 0.8).abs() < 1e-12);

    std::fs::write(&cfg, r#"{"dimension": 6}"#).unwrap();
    assert_eq!(gls(&["constants", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["sharpness", "--n", "5", "--p", "1.8", "--eps", "0.1,0.03", "--no-timestamp"];
    let stdout = gls(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let out = gls(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn sharpness_rejects_increasing_eps() {
    let out = gls(&["sharpness", "--n", "5", "--p", "1.8", "--eps", "0.01,0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn timestamp_present_by_default() {
    let v = json(&gls(&["constants", "--n", "5", "--p", "2"]));
    assert!(v["timestamp"].as_str().unwrap().starts_with("unix:"));
}
