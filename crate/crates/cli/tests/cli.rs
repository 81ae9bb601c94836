use std::path::Path;
use std::process::{Command, Output};

use secnoma::sop::{exact_sop_far, exact_sop_near};
use secnoma::{derive_stats, SystemParams, TargetRates};
use serde_json::Value;

fn secnoma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secnoma"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn column(doc: &Value, name: &str) -> Vec<Value> {
    let i = doc["columns"]
        .as_array()
        .unwrap()
        .iter()
        .position(|c| c == name)
        .unwrap();
    doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[i].clone())
        .collect()
}

#[test]
fn validate_passes_on_reference_setup() {
    let out = secnoma(&["validate", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert!(doc["summary"]["max_curve_rmse"].as_f64().unwrap() <= 5e-3);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 18);
    assert!(stderr(&out).contains("PASS within_3sigma"));
}

#[test]
fn validate_catches_corrupted_near_gain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[fault]\nanalytical_lambda1_scale = 0.5\n");
    let out = secnoma(&["validate", "--config", &cfg, "--samples", "200000"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("FAIL within_3sigma"));
}

#[test]
fn empty_sweep_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "# reversed range\n[sweep]\naxis = \"rth1\"\nstart = 2.0\nstop = 1.0\nstep = 0.5\n",
    );
    let out = secnoma(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[system]\nnoise_dbm = -60\nrho_r_db = \n");
    let out = secnoma(&["minmax", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn missing_config_and_bad_flags_exit_with_two() {
    assert_eq!(
        secnoma(&["minmax", "--config", "/nonexistent/run.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        secnoma(&["minmax", "--format", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        secnoma(&["minmax", "--samples", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn distance_sweep_rows_match_library() {
    let out = secnoma(&["distance-sweep", "--format", "json", "--samples", "10000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    let d2 = column(&doc, "d2_m");
    let so1 = column(&doc, "so1_exact");
    let so2 = column(&doc, "so2_exact");
    let base = SystemParams::reference();
    let t = TargetRates::new(1.0, 1.0).unwrap();
    for i in [0, 4, d2.len() - 1] {
        let stats =
            derive_stats(&base.with_far_distance(d2[i].as_f64().unwrap()).unwrap()).unwrap();
        assert_eq!(
            so1[i].as_f64().unwrap(),
            exact_sop_near(&stats, 0.5, &t).unwrap().value
        );
        assert_eq!(
            so2[i].as_f64().unwrap(),
            exact_sop_far(&stats, 0.5, &t).unwrap().value
        );
    }
    assert!(stderr(&out).contains("PASS so1_nonincreasing_in_d2"));
    assert!(stderr(&out).contains("PASS so2_nondecreasing_in_d2"));
}

#[test]
fn distance_sweep_rejects_far_user_inside_near_distance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep = { axis = \"d2_m\", start = 40.0, stop = 100.0, step = 10.0 }\n",
    );
    assert_eq!(
        secnoma(&["distance-sweep", "--config", &cfg]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_over_wrong_axis_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep = { axis = \"alpha\", start = 0.1, stop = 0.9, step = 0.1 }\n",
    );
    assert_eq!(
        secnoma(&["minmax", "--config", &cfg]).status.code(),
        Some(2)
    );
}

#[test]
fn optimize_reports_optima_and_curve() {
    let out = secnoma(&["optimize", "--format", "json", "--samples", "10000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    let s = &doc["summary"];
    assert!((s["alpha1_hat"].as_f64().unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    assert!((s["alpha2_hat"].as_f64().unwrap() - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    let a1 = s["alpha1_star"].as_f64().unwrap();
    assert!((s["so1_curve_argmin"].as_f64().unwrap() - a1).abs() <= 0.015);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 99);
}

#[test]
fn zero_targets_serialize_degenerate_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "targets.rth1 = 0.0\ntargets.rth2 = 0.0\n");
    let out = secnoma(&[
        "optimize",
        "--config",
        &cfg,
        "--format",
        "json",
        "--samples",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = &json(&out)["summary"];
    for key in ["alpha1_star", "alpha2_star", "alpha1_hat", "alpha2_hat"] {
        assert_eq!(s[key], "degenerate", "{key}");
    }
    // the far optimum sits on the boundary, so only the format is checked
    let out = secnoma(&["minmax", "--config", &cfg, "--format", "json"]);
    assert_ne!(out.status.code(), Some(2), "{}", stderr(&out));
    let doc = json(&out);
    assert!(column(&doc, "alpha2_star")
        .iter()
        .all(|v| v == "degenerate"));
    assert!(column(&doc, "alpha1_star").iter().all(|v| v.is_f64()));
}

#[test]
fn minmax_checks_pass_on_reference_grid() {
    let out = secnoma(&["minmax", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    for (obj, grid) in column(&doc, "max_sop")
        .iter()
        .zip(column(&doc, "grid_min_max_sop"))
    {
        assert!(obj.as_f64().unwrap() <= grid.as_f64().unwrap() + 1e-3);
    }
}

#[test]
fn gain_comparison_uses_fixed_split_and_reference_values() {
    let out = secnoma(&["gain-comparison", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    let s = &doc["summary"];
    assert_eq!(s["fixed_alpha"], 0.33);
    assert_eq!(s["published_gain_vs_fixed_pct"], 55.12);
    assert_eq!(s["published_gain_vs_alpha1_pct"], 69.30);
    assert_eq!(s["published_gain_vs_alpha2_pct"], 19.11);
    assert!(s["published_gain_note"]
        .as_str()
        .unwrap()
        .contains("averaging protocol unspecified"));
    let rho: Vec<f64> = column(&doc, "rho_r_db")
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(rho, vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0]);
    for name in [
        "gain_vs_fixed_pct",
        "gain_vs_alpha1_pct",
        "gain_vs_alpha2_pct",
    ] {
        assert!(
            column(&doc, name)
                .iter()
                .all(|g| g.as_f64().unwrap() >= 0.0),
            "{name}"
        );
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("minmax.csv");
    let to_file = secnoma(&["minmax", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let to_stdout = secnoma(&["minmax"]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(to_stdout.stdout.as_slice());
    assert_eq!(reader.headers().unwrap().get(0), Some("rth1_bps_hz"));
    assert_eq!(reader.records().count(), 6);
}

#[test]
fn seed_changes_empirical_columns_only() {
    let a = secnoma(&[
        "distance-sweep",
        "--format",
        "json",
        "--samples",
        "5000",
        "--seed",
        "1",
    ]);
    let b = secnoma(&[
        "distance-sweep",
        "--format",
        "json",
        "--samples",
        "5000",
        "--seed",
        "2",
    ]);
    let (a, b) = (json(&a), json(&b));
    assert_eq!(column(&a, "so1_exact"), column(&b, "so1_exact"));
    assert_ne!(column(&a, "so2_empirical"), column(&b, "so2_empirical"));
}

#[test]
fn conditioned_flag_is_recorded() {
    let out = secnoma(&[
        "validate",
        "--format",
        "json",
        "--samples",
        "1000",
        "--conditioned",
    ]);
    assert_eq!(json(&out)["summary"]["conditioned"], true);
}
