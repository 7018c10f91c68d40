use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_melscope"))
        .args(args)
        .env_remove("MELSCOPE_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

/// Everything before `"elapsed_ms"`.
fn without_elapsed(out: &Output) -> String {
    let s = String::from_utf8(out.stdout.clone()).unwrap();
    s[..s.find("\"elapsed_ms\"").unwrap()].to_string()
}

#[test]
fn bell_emits_phi_plus() {
    let v = json(&["bell", "--d", "2", "--n", "0", "--m", "0"]);
    assert_eq!(v["command"], "bell");
    let amps = v["payload"]["amplitudes"].as_array().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [s, 0.0, 0.0, s];
    for (a, e) in amps.iter().zip(expected) {
        assert!((f(&a[0]) - e).abs() < 1e-15);
        assert_eq!(f(&a[1]), 0.0);
    }
    assert_eq!(v["payload"]["u"].as_array().unwrap().len(), 2);
}

#[test]
fn bell_lists_whole_family() {
    let v = json(&["bell", "--d", "3"]);
    assert_eq!(v["payload"]["states"].as_array().unwrap().len(), 9);
}

#[test]
fn numbers_have_seventeen_significant_digits() {
    let out = run(&["bell", "--d", "2", "--n", "0", "--m", "0"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("7.0710678118654746e-1"), "{s}");
    assert!(!s.contains("-0.0000000000000000e0"));
}

#[test]
fn teleport_branches_reproduce_channel_image() {
    let v = json(&[
        "teleport",
        "--d",
        "3",
        "--channel",
        "1,2",
        "--probe",
        "1+0.5i,0-1i,0.25",
    ]);
    assert_eq!(v["status"], "pure_output");
    let branches = v["payload"]["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 9);
    for b in branches {
        assert!((f(&b["probability"]) - 1.0 / 9.0).abs() < 1e-12);
        assert!((f(&b["fidelity_with_channel_image"]) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn two_copy_all_recovers_every_index() {
    let v = json(&["two-copy", "--d", "3", "--all"]);
    assert_eq!(v["status"], "all_recovered");
    assert_eq!(v["payload"]["recovered"], 9);
    assert_eq!(v["payload"]["total"], 9);
    let single = json(&["two-copy", "--d", "4", "--hidden", "3:1"]);
    assert_eq!(single["payload"]["rows"][0]["recovered"], serde_json::json!([3, 1]));
}

#[test]
fn check_set_reports_undecided_negative_case() {
    let v = json(&["check-set", "--d", "4", "--set", "0:0,1:0,2:0,0:2", "--seed", "5"]);
    assert_eq!(v["status"], "Undecided");
    assert_eq!(v["seed"], 5);
    assert!(f(&v["payload"]["best_objective"]) > 0.49);
}

#[test]
fn check_set_accepts_two_digit_form() {
    let v = json(&["check-set", "--d", "3", "--set", "00,10,20"]);
    assert_eq!(v["status"], "FeasibleByCatalog");
    assert!(f(&v["payload"]["defect"]) <= 1e-15);
}

#[test]
fn conjugated_check_on_preset() {
    let v = json(&[
        "check-set-conjugated",
        "--d",
        "3",
        "--preset",
        "dissociation",
        "--restarts",
        "8",
    ]);
    assert_eq!(v["status"], "Undecided");
    assert!(f(&v["payload"]["best_objective"]) >= 1.0 - 1e-9);
}

#[test]
fn seed_comes_from_environment_unless_overridden() {
    let args = ["check-set", "--d", "3", "--set", "01,12,21", "--restarts", "4"];
    let env = Command::new(env!("CARGO_BIN_EXE_melscope"))
        .args(args)
        .env("MELSCOPE_SEED", "99")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["seed"], 99);
    let over = Command::new(env!("CARGO_BIN_EXE_melscope"))
        .args(args)
        .args(["--seed", "3"])
        .env("MELSCOPE_SEED", "99")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&over.stdout).unwrap();
    assert_eq!(v["seed"], 3);
    let bad = Command::new(env!("CARGO_BIN_EXE_melscope"))
        .args(args)
        .env("MELSCOPE_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "check-set",
        "--d",
        "4",
        "--set",
        "00,10,20,02",
        "--seed",
        "17",
        "--restarts",
        "16",
    ];
    let a = without_elapsed(&run(&args));
    let b = without_elapsed(&run(&args));
    assert_eq!(a, b);
}

#[test]
fn census_json_and_csv() {
    let v = json(&["census", "--d", "2", "--k", "2"]);
    assert_eq!(v["payload"]["subsets"], 6);
    assert_eq!(v["payload"]["undecided"], 0);
    let out = run(&["census", "--d", "2", "--k", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "members,status,defect,best_objective,probe");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.contains(",Undecided,")));
    let limited = json(&["census", "--d", "3", "--k", "3", "--limit", "5"]);
    assert_eq!(limited["payload"]["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn entropy_bound_pass_and_infinite_fail() {
    let v = json(&["entropy-bound", "--d", "2", "--set", "00,10,01"]);
    assert_eq!(v["status"], "pass");
    assert!((f(&v["payload"]["value"]) - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    let v = json(&["entropy-bound", "--d", "3", "--set", "00,10,20,01"]);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["payload"]["value"], "inf");
}

#[test]
fn canonicalize2_matches_family() {
    let v = json(&["canonicalize2", "--theta", "0.7", "--delta", "-2.1"]);
    assert_eq!(v["status"], "ok");
    assert!(f(&v["payload"]["max_residual"]) <= 1e-12);
    assert!((f(&v["payload"]["alpha"]) - 1.4).abs() < 1e-15);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["frobnicate"][..],
        &["check-set", "--d", "4", "--set", "44"],
        &["check-set", "--d", "4", "--set", "0:0,,1:0"],
        &["check-set", "--d", "12", "--set", "11,22"],
        &["check-set", "--d", "4"],
        &["teleport", "--d", "2", "--channel", "0,1", "--probe", "1,2,3"],
        &["teleport", "--d", "2", "--channel", "0,1", "--probe", "0,0"],
        &["bell", "--d", "1"],
        &["bell", "--d", "3", "--n", "1"],
        &["census", "--d", "2", "--k", "9"],
        &["check-set", "--d", "4", "--preset", "dissociation"],
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn runtime_errors_exit_with_one() {
    // Wrong set size for the entropy bound is detected by the library.
    let out = run(&["entropy-bound", "--d", "2", "--set", "00,10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["check-set", "--d", "3", "--set", "00"]);
    assert_eq!(out.status.code(), Some(1));
}
