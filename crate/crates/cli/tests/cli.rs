use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use autorbit_cli::ReportFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_autorbit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no JSON on stderr: {text}"));
    serde_json::from_str::<Value>(line).unwrap()["error"].clone()
}

#[test]
fn orbit_exp_matches_oracle() {
    let out = run(&["orbit", "--function", "exp", "--z", "1+0i", "--radius", "20"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["schema_version"], 1);
    let sample = &v["samples"][0];
    assert_eq!(sample["orbit"]["count"], 7);
    assert_eq!(sample["oracle_diff"]["oracle_count"], 7);
    assert!(sample["oracle_diff"]["max_distance"].as_f64().unwrap() < 1e-8);
    assert_eq!(sample["oracle_diff"]["multiplicities_match"], true);
    // radii are decimal strings
    assert_eq!(v["config"]["radius"], "20");
    assert!(sample["orbit"]["radius"].is_string());
    assert!(sample["orbit"]["points"][0]["location"]["re"].is_number());
}

#[test]
fn orbit_cossqrt_has_five_points() {
    let v = json_of(&run(&["orbit", "--function", "cossqrt", "--z", "1+0i", "--radius", "200"]));
    assert_eq!(v["samples"][0]["orbit"]["count"], 5);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn orbit_in_critical_fiber_is_rejected() {
    let out = run(&["orbit", "--function", "monomial", "--n", "4", "--z", "0+0i", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_error(&out);
    assert_eq!(err["kind"], "ExcludedFiber");
    assert_eq!(err["multiplicity"], 4);
    let v = json_of(&out);
    let points = v["samples"][0]["orbit"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 1);
    assert_eq!(points[0]["multiplicity"], 4);
    assert!(v["notes"][0].as_str().unwrap().contains("multiplicity 4"));
}

#[test]
fn verify_all_cossqrt() {
    let out = run(&["verify", "--suite", "all", "--function", "cossqrt"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert!(v["summary"]["pass"].as_u64().unwrap() >= 6);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["xfail"], 1);
}

#[test]
fn vanishing_on_exp_is_expected_to_fail() {
    let out = run(&["verify", "--suite", "vanishing", "--function", "exp"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let entry = &v["reports"][0];
    assert_eq!(entry["status"], "xfail");
    assert_eq!(entry["xfail"], true);
    assert_eq!(entry["report"]["pass"], false);
}

#[test]
fn expg_passes_at_stated_tolerance() {
    let out = run(&["verify", "--suite", "expg"]);
    assert!(out.status.success());
    let v = json_of(&out);
    for e in v["reports"].as_array().unwrap() {
        assert_eq!(e["status"], "pass", "{e}");
        assert_eq!(e["report"]["tolerance"], "0.000001");
    }
}

#[test]
fn tshift_reports_integers() {
    let v = json_of(&run(&["verify", "--suite", "tshift"]));
    for e in v["reports"].as_array().unwrap() {
        assert_eq!(e["status"], "pass");
        let seq = e["report"]["sequence"].as_array().unwrap();
        assert_eq!(seq.len(), 7);
        assert!(seq.iter().all(|t| t.as_f64().unwrap().fract() == 0.0));
    }
}

#[test]
fn suites_not_applicable_are_skipped() {
    let v = json_of(&run(&["verify", "--suite", "expg", "--function", "cossqrt"]));
    assert_eq!(v["reports"].as_array().unwrap().len(), 0);
    assert_eq!(v["skipped"][0]["suite"], "expg");
    assert_eq!(v["summary"]["skipped"], 1);
}

#[test]
fn engine_error_in_a_suite_fails_the_run() {
    // two refinements of 16 nodes cannot resolve the contour sums
    let out = run(&["verify", "--suite", "derivsum", "--nodes-initial", "16", "--max-doublings", "1", "--radius", "30"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert!(v["summary"]["error"].as_u64().unwrap() + v["summary"]["fail"].as_u64().unwrap() > 0);
    assert!(stderr_error(&out)["kind"].is_string());
}

#[test]
fn density_exp_order_one() {
    let v = json_of(&run(&["density", "--function", "exp", "--z", "1+0i", "--rgrid", "10:1e4:log"]));
    let rho_hat = v["samples"][0]["counting_profile"]["rho_hat"].as_f64().unwrap();
    assert!((rho_hat - 1.0).abs() < 0.05, "{rho_hat}");
    assert_eq!(v["samples"][0]["degenerate_fit"], false);
    assert_eq!(v["config"]["r_grid"], "10:1e4:log");
}

#[test]
fn density_wiman_quarter_order() {
    let out = run(&["density", "--function", "quarter", "--wiman", "--rho", "0.25", "--eps", "0.05"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(v["samples"][0]["wiman_radii"]["radii"].as_array().unwrap().len() >= 5);
    assert_eq!(v["reports"][0]["status"], "pass");
    let row = &v["rows"][0];
    assert!(row["r"].is_string() && row["log_m"].is_number());
}

#[test]
fn density_polynomial_is_degenerate() {
    let out = run(&["density", "--function", "poly", "--coeffs", "1,1", "--z", "1+0i"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["samples"][0]["degenerate_fit"], true);
    assert!(v["notes"][0].as_str().unwrap().starts_with("DegenerateFit"));
}

#[test]
fn report_file_round_trips() {
    let path = tmp("roundtrip.json");
    let out = run(&["verify", "--suite", "all", "--function", "quadzz", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: ReportFile = serde_json::from_str(&text).unwrap();
    let again: ReportFile = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, again);
    let original: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_value(&parsed).unwrap(), original);
}

#[test]
fn csv_has_one_row_per_report() {
    let json_path = tmp("rows.json");
    let csv_path = tmp("rows.csv");
    let args = ["verify", "--suite", "all", "--function", "exp"];
    assert!(bin().args(args).args(["-o", json_path.to_str().unwrap()]).status().unwrap().success());
    let st = bin().args(args).args(["-o", csv_path.to_str().unwrap(), "--format", "csv"]).status().unwrap();
    assert!(st.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "suite");
    assert!(headers.iter().any(|h| h == "abs_err"));
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), v["reports"].as_array().unwrap().len());
    let status = headers.iter().position(|h| h == "status").unwrap();
    let abs = headers.iter().position(|h| h == "abs_err").unwrap();
    for (row, e) in rows.iter().zip(v["reports"].as_array().unwrap()) {
        assert_eq!(row[status], *e["status"].as_str().unwrap());
        // scalar fields survive the flattening exactly
        let a: f64 = row[abs].parse().unwrap();
        assert_eq!(a, e["report"]["abs_err"].as_f64().unwrap());
    }
}

#[test]
fn orbit_csv_has_header_and_points() {
    let out = run(&["orbit", "--function", "exp", "--z", "1+0i", "--radius", "20", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,multiplicity,residual,polished"));
    assert_eq!(lines.count(), 7);
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("runtime_ms");
            map.remove("wall_time_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn runs_are_deterministic_and_seeded() {
    let args = ["verify", "--suite", "derivsum", "--function", "cossqrt", "--random", "3", "--seed", "11"];
    let mut a = json_of(&run(&args));
    let mut b = json_of(&run(&args));
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
    assert_eq!(a["reports"].as_array().unwrap().len(), 12);
    assert_eq!(a["config"]["seed"], 11);
    let c = json_of(&run(&["verify", "--suite", "derivsum", "--function", "cossqrt", "--random", "3", "--seed", "12"]));
    assert_ne!(a["reports"][3]["report"]["inputs"], c["reports"][3]["report"]["inputs"]);
}

#[test]
fn bad_input_gives_structured_errors() {
    let out = run(&["orbit", "--function", "exp", "--z", "1+x", "--radius", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_error(&out);
    assert_eq!(err["kind"], "InvalidInput");
    assert!(err["message"].as_str().unwrap().contains("1+x"));

    let out = run(&["orbit", "--function", "exp", "--radius", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "UsageError");

    let out = run(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quadrature_overrides_are_echoed() {
    let v = json_of(&run(&["verify", "--suite", "cycle", "--nodes-initial", "512", "--tol-abs", "1e-12"]));
    assert_eq!(v["config"]["quadrature"]["nodes_initial"], 512);
    assert_eq!(v["config"]["quadrature"]["tol_abs"], "0.000000000001");
    let out = run(&["verify", "--suite", "cycle", "--nodes-initial", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error(&out)["kind"], "InvalidInput");
}
