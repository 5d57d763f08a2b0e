use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn pansu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pansu")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = pansu(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn sphere_default_grid() {
    let r = report(&["sphere", "--grid", "0:5:0.25"]);
    assert_eq!(r["schema"], 1);
    let rows = r["data"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 21);
    assert!((rows[0]["area"].as_f64().unwrap() - PI * PI).abs() < 1e-6);
    assert!(rows.iter().all(|row| row["poles"] == 2));
}

#[test]
fn sphere_volume_at_one() {
    let r = report(&["sphere", "--grid", "1"]);
    let v = r["data"]["rows"][0]["volume"].as_f64().unwrap();
    assert!((v - 1.14602415154076).abs() < 1e-9);
}

#[test]
fn sphere_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    report(&["sphere", "--grid", "0,1", "--csv", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,area,area_error,volume,volume_error,poles");
    assert_eq!(lines.len(), 3);
}

#[test]
fn bad_grids_are_usage_errors() {
    for g in ["", "2:1:0.5", "x", "0:1:0"] {
        assert_eq!(pansu(&["sphere", "--grid", g]).status.code(), Some(64), "{g:?}");
    }
    assert_eq!(pansu(&["nonsense"]).status.code(), Some(64));
}

#[test]
fn calibrate_mean_divergence() {
    let r = report(&["calibrate", "--lambda", "2", "--samples", "1000", "--h", "1e-4"]);
    for c in r["data"]["campaigns"].as_array().unwrap() {
        assert!((c["stats"]["mean"].as_f64().unwrap() + 4.0).abs() < 1e-4);
    }
    assert_eq!(r["pass"], true);
}

#[test]
fn calibrate_rejects_bad_step() {
    assert_eq!(pansu(&["calibrate", "--h", "0.5"]).status.code(), Some(64));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["calibrate", "--lambda", "0.5,1", "--samples", "200", "--seed", "7"];
    let a = pansu(&args);
    let b = pansu(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = pansu(&["calibrate", "--lambda", "0.5,1", "--samples", "200", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn plateau_identity() {
    let r = report(&["plateau", "--preset", "identity"]);
    assert!((r["data"]["area"].as_f64().unwrap() - PI * PI / 2.0).abs() < 1e-6);
}

#[test]
fn plateau_optimizer_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let r = report(&["plateau", "--preset", "sinusoidal:0.2", "--optimize", "--csv", path.to_str().unwrap()]);
    assert!((r["data"]["optimizer"]["area"].as_f64().unwrap() - PI * PI / 2.0).abs() < 1e-6);
    assert!(std::fs::read_to_string(path).unwrap().starts_with("iteration,"));
}

#[test]
fn plateau_winding_mismatch() {
    assert_eq!(pansu(&["plateau", "--preset", "identity", "--winding", "2"]).status.code(), Some(64));
}

#[test]
fn isoperim_ball_has_zero_slack() {
    let r = report(&["isoperim", "--preset", "pansu-ball:1"]);
    let c = &r["data"]["comparisons"][0];
    assert!(c["slack"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn isoperim_competitors_have_positive_slack() {
    let r = report(&["isoperim", "--preset", "tube:1:0.3,lens:1:0.5,skewed-ball:2:0.4"]);
    for c in r["data"]["comparisons"].as_array().unwrap() {
        assert!(c["slack"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn isoperim_hypothesis_violation() {
    assert_eq!(pansu(&["isoperim", "--preset", "shifted-ball:1:0.2"]).status.code(), Some(4));
    assert_eq!(pansu(&["isoperim", "--preset", "no-such-set:1"]).status.code(), Some(64));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = pansu(&["sphere", "--grid", "0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(path).unwrap(), pansu(&["sphere", "--grid", "0.5"]).stdout);
}
