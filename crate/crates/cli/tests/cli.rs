use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digitwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("digitwalk-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn expand_prints_preperiod_and_period() {
    assert_eq!(stdout(&["expand", "2/3"]).trim(), "|10");
    assert_eq!(stdout(&["expand", "1/2"]).trim(), "1|0");
    assert_eq!(stdout(&["expand", "6/7"]).trim(), "|110");
    assert_eq!(stdout(&["expand", "1/3", "--base", "3"]).trim(), "1|0");
    assert_eq!(stdout(&["expand", "1/4", "--base", "3"]).trim(), "|02");
}

#[test]
fn classify_exit_codes_follow_the_verdict() {
    let closed = run(&["classify", "6/7"]);
    assert_eq!(closed.status.code(), Some(0));
    let line = String::from_utf8(closed.stdout).unwrap();
    let fields: Vec<&str> = line.trim().split(',').collect();
    assert_eq!(fields[0], "6/7");
    assert_eq!(fields[2], "closed");

    let drift = run(&["classify", "2/3"]);
    assert_eq!(drift.status.code(), Some(10));
    assert!(String::from_utf8(drift.stdout).unwrap().contains(",drift,"));
}

#[test]
fn classify_header_and_jsonl() {
    let csv = stdout(&["classify", "0/1", "--header"]);
    assert!(csv.starts_with("r,base,kind,"));
    let json = stdout(&["classify", "0/1", "--format", "jsonl"]);
    assert!(json.trim_start().starts_with('{'));
    assert!(json.contains("\"closed\""));
}

#[test]
fn torsion_after_a_hexagon_is_one() {
    let out = stdout(&["torsion", "0/1", "--steps", "6"]);
    assert_eq!(out.lines().last().unwrap(), "6,6,1/1");
}

#[test]
fn equiv_finds_the_inserted_hexagon() {
    assert_eq!(stdout(&["equiv", "1/2", "1/128"]).trim(), "insert@1:0");
    let unknown = run(&["equiv", "1/2", "1/3", "--budget", "1"]);
    assert_eq!(unknown.status.code(), Some(20));
}

#[test]
fn surgery_output_reparses() {
    let out = stdout(&["surgery", "1/2", "insert@1:1"]);
    let value = out.trim().split(',').next().unwrap().to_string();
    assert_eq!(value, "127/128");
    assert_eq!(stdout(&["sync", "1/2", &value]).trim(), "0,6");
}

#[test]
fn survey_is_independent_of_job_count() {
    let one = stdout(&["survey", "--max-q", "50", "--jobs", "1"]);
    let eight = stdout(&["survey", "--max-q", "50", "--jobs", "8"]);
    assert_eq!(one, eight);
    assert!(one.lines().last().unwrap().starts_with("# total="));
}

#[test]
fn render_is_deterministic() {
    let a = scratch("a.svg");
    let b = scratch("b.svg");
    stdout(&["render", "6/7", "--steps", "60", "-o", a.to_str().unwrap()]);
    stdout(&["render", "6/7", "--steps", "60", "-o", b.to_str().unwrap()]);
    let svg = fs::read_to_string(&a).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg, fs::read_to_string(&b).unwrap());
}

#[test]
fn digits_file_matches_the_number() {
    let file = scratch("digits.txt");
    fs::write(&file, "110110110110").unwrap();
    let from_file = stdout(&["walk", "--digits-file", file.to_str().unwrap(), "--steps", "12"]);
    let from_number = stdout(&["walk", "6/7", "--steps", "12"]);
    assert_eq!(from_file, from_number);
}

#[test]
fn mismatched_base_and_grid_is_an_error() {
    let out = run(&["classify", "1/3", "--base", "3", "--grid", "hex"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn winding_accepts_negative_centers() {
    let out = stdout(&["winding", "--digits-file", write_digits("111111").to_str().unwrap(), "--steps", "6", "--center", "0,-1"]);
    assert_eq!(out.lines().last().unwrap(), "6,-1");
}

fn write_digits(digits: &str) -> PathBuf {
    let file = scratch(&format!("{digits}.txt"));
    fs::write(&file, digits).unwrap();
    file
}
