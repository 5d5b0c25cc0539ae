use std::collections::BTreeSet;
use std::process::{Command, Output};

fn solenoid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solenoid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = solenoid(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn ball_of_radius_two() {
    let v = json(&["ball", "--p", "2", "--d", "2", "--n", "0", "--r", "2"]);
    assert_eq!(v["count"], 9);
    assert_eq!(v["elements"].as_array().unwrap().len(), 9);
}

#[test]
fn csv_and_json_list_the_same_elements() {
    let args = ["ball", "--p", "3", "--d", "2", "--n", "1", "--r", "2.5"];
    let from_json: BTreeSet<String> = json(&args)["elements"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["g"].as_str().unwrap().to_string())
        .collect();
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let text = stdout(&csv_args);
    let from_csv: BTreeSet<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    assert!(!from_csv.is_empty());
    assert_eq!(from_json, from_csv);
}

#[test]
fn exit_codes() {
    let bad = solenoid(&["ball", "--p", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("p must be"));
    assert_eq!(solenoid(&["ball", "--bogus"]).status.code(), Some(1));
    assert_eq!(solenoid(&["spectrum", "--tol", "0"]).status.code(), Some(3));
    assert_eq!(solenoid(&["spectrum"]).status.code(), Some(0));
    let capped = solenoid(&["ball", "--n", "12", "--r", "60"]);
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn failed_runs_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.json");
    let status = solenoid(&["spectrum", "--tol", "0", "--out", out.to_str().unwrap()]).status;
    assert_eq!(status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn half_generator_lip() {
    let v = json(&["lip", "--generator", "1/2,0"]);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 1.25f64.sqrt()).abs() < 1e-9, "{v}");
    assert!(v["trace"].as_array().unwrap().len() > 1);
}

#[test]
fn trace_states_are_at_distance_zero() {
    let v = json(&["distance", "--phi", "trace", "--psi", "trace"]);
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["degenerate"], true);
}

#[test]
fn converge_eps_is_nonincreasing() {
    let text = stdout(&[
        "converge", "--n", "0", "--m", "2", "--sweep-N", "2,4,8,16", "--series", "eps", "--format", "csv",
    ]);
    let eps: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(eps.len(), 4);
    assert!(eps.windows(2).all(|w| w[1] <= w[0]), "{eps:?}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"p": 3, "d": 1, "n": 1, "r": 2.0}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json(&["ball", "--config", cfg]);
    assert_eq!(v["p"], 3);
    assert_eq!(v["n"], 1);
    let v = json(&["ball", "--config", cfg, "--r", "3"]);
    assert_eq!(v["r"], 3.0);
    std::fs::write(dir.path().join("bad.json"), r#"{"radius": 2}"#).unwrap();
    let bad = solenoid(&["ball", "--config", dir.path().join("bad.json").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn reports_repeat_byte_for_byte() {
    let args = ["fejer", "--seed", "5", "--N", "8", "--theta", "1/3"];
    assert_eq!(stdout(&args), stdout(&args));
}
