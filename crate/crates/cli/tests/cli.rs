use std::path::PathBuf;
use std::process::{Command, Output};

use qgame_core::{load_game_file, strategic_form};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgame")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&all)).unwrap()
}

fn close(v: &Value, expect: f64) -> bool {
    (v.as_f64().unwrap() - expect).abs() < 1e-9
}

#[test]
fn demo_hadamard_wins_every_game() {
    let doc = json(&["demo"]);
    assert!(close(&doc["cumulative_picard_payoff"], -10.0));
    let games = doc["games"].as_array().unwrap();
    assert_eq!(games.len(), 10);
    for g in games {
        assert!(close(&g["head_up_probability"], 1.0));
        assert!(close(&g["picard_payoff"], -1.0));
    }
}

#[test]
fn demo_variants() {
    assert!(close(&json(&["demo", "--q", "uniform"])["cumulative_picard_payoff"], 0.0));
    let none = json(&["demo", "--q", "none", "--rounds", "3"]);
    assert!(close(&none["cumulative_picard_payoff"], -3.0));
    assert!(stdout(&["demo"]).contains("Picard cumulative expected payoff: -10.000000"));
}

#[test]
fn demo_rejects_bad_probability() {
    assert_eq!(run(&["demo", "--p", "1.5"]).status.code(), Some(2));
}

#[test]
fn pennyflip_strategic_form_csv() {
    let csv = stdout(&["strategic-form"]);
    assert_eq!(csv, "P1\\P2,NN,NF,FN,FF\nN,-1,1,1,-1\nF,1,-1,-1,1\n");
}

#[test]
fn file_strategic_form_matches_library() {
    let path = fixture("cyclic3.json");
    let csv = stdout(&["strategic-form", "--game", path.to_str().unwrap()]);
    let game = load_game_file(&path).unwrap();
    assert_eq!(csv, strategic_form(&game).to_csv());
    // One row per pure P1 strategy (two moves, two actions) plus the header.
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn missing_game_file_is_a_usage_error() {
    let out = run(&["strategic-form", "--game", "/nonexistent/game.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn solve_mixed_pair() {
    let doc = json(&["solve"]);
    assert_eq!(doc["equilibrium"], true);
    assert!(doc["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn solve_mixed_against_quantum() {
    let doc = json(&["solve", "--class", "mixed", "quantum", "--restarts", "4"]);
    assert_eq!(doc["equilibrium"], true);
    assert!(close(&doc["value"], -1.0));
}

#[test]
fn solve_pure_pair_reports_absence() {
    let out = run(&["solve", "--class", "pure", "pure"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("no pure equilibrium"));
    assert!(text.contains("best-response cycle"));
    let doc = json(&["solve", "--class", "pure", "pure"]);
    assert_eq!(doc["equilibrium"], false);
}

#[test]
fn solve_rejects_bad_arguments() {
    assert_eq!(run(&["solve", "--class", "mixed", "clever"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--grid", "3"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--frobnicate"]).status.code(), Some(2));
}

#[test]
fn theorem_one_lift_is_exact() {
    let doc = json(&["theorem", "1"]);
    assert!(doc["max_error"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn theorem_two_certificates_all_win() {
    assert!(stdout(&["theorem", "2"]).contains("100/100 certificates"));
    let doc = json(&["theorem", "2", "--samples", "20", "--seed", "7"]);
    assert_eq!(doc["winning_certificates"], 20);
}

#[test]
fn theorem_three_ladder() {
    let text = stdout(&["theorem", "3", "--rounds", "2", "--restarts", "4"]);
    assert!(text.contains("exploitability nonincreasing: yes"), "{text}");
}

#[test]
fn json_output_is_byte_stable() {
    let args = ["solve", "--class", "mixed-quantum", "mixed-quantum", "--grid", "4", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["theorem", "2", "--samples", "5", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("form.csv");
    let out = run(&["strategic-form", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&["strategic-form"]));

    let path = dir.path().join("solve.json");
    assert!(run(&["solve", "--format", "json", "--out", path.to_str().unwrap()]).status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["equilibrium"], true);
}
