use std::path::PathBuf;
use std::process::{Command, Output};

use kohncert_core::problem::parse_input_file;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kohncert"))
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn certify(args: &[&str]) -> Output {
    bin().arg("certify").args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kohncert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn examples_parse() {
    for entry in std::fs::read_dir(example("")).unwrap() {
        let p = entry.unwrap().path();
        parse_input_file(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn certified_example_exits_zero() {
    let o = certify(&["--input", example("cusp.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("s (jets): 6"));
    assert!(text.contains("achieved epsilon: 1/384"));
    assert!(!text.contains("  I1"));
}

#[test]
fn json_report_fields() {
    let o = certify(&["--input", example("cusp.toml").to_str().unwrap(), "--format", "json", "--verbose"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["s_jets"], 6);
    assert_eq!(v["s_projection"], 6);
    assert_eq!(v["methods_agree"], true);
    assert_eq!(v["bound_satisfied"], true);
    assert_eq!(v["kohn"]["terminated"], true);
    assert_eq!(v["kohn"]["achieved_epsilon"], "1/384");
    assert_eq!(v["kohn"]["trace"].as_array().unwrap().len(), 3);
    assert_eq!(v["kohn"]["trace_digest"].as_str().unwrap().len(), 64);
    assert_eq!(v["replay"]["seed"], 1);
    assert_eq!(v["rules"]["bound_mode"], "report-only");
}

#[test]
fn infinite_colength_exits_three() {
    let o = certify(&["--input", example("shared_line.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let o = bin()
        .args(["multiplicity", "--input", example("shared_line.toml").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn schema_errors_exit_two() {
    let one = temp_file("one.toml", "germs = [\"z1\"]\n");
    assert_eq!(code(&certify(&["--input", one.to_str().unwrap()])), 2);
    let bad = temp_file("bad.toml", "germs = [\"z1\", \"z2^\"]\n");
    let o = certify(&["--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("germs[1]"));
    let unit = temp_file("unit.toml", "germs = [\"1 + z1\", \"z2\"]\n");
    assert_eq!(code(&certify(&["--input", unit.to_str().unwrap()])), 2);
    assert_eq!(code(&certify(&["--input", "/nonexistent/x.toml"])), 2);
    assert_eq!(code(&certify(&[])), 2);
    let o = certify(&["--input", example("cusp.toml").to_str().unwrap(), "--jet-cap", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn step_cap_exits_four() {
    let o = certify(&["--input", example("cusp.toml").to_str().unwrap(), "--max-steps", "1"]);
    assert_eq!(code(&o), 4);
    let o = certify(&["--input", example("cusp.toml").to_str().unwrap(), "--jet-cap", "3"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn seed_override_is_recorded() {
    let o = certify(&["--input", example("cusp.toml").to_str().unwrap(), "--seed", "99", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["replay"]["seed"], 99);
}

#[test]
fn batch_mode_reports_worst_code() {
    let o = certify(&["--input-dir", example("").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.matches("== ").count(), 6);
}

#[test]
fn multiplicity_subcommand() {
    let o = bin()
        .args(["multiplicity", "--input", example("three_quadrics.toml").to_str().unwrap(), "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["s_jets"], 3);
    assert_eq!(v["projection_target"], "generic_pair");
    assert!(v["target_colength"].as_u64().unwrap() >= 3);
}

#[test]
fn bound_subcommand() {
    let o = bin().args(["bound", "--s", "1"]).output().unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("epsilon = 1/186624"));
    assert!(text.contains("breakdown: 2^6 * 1 * 81 * 36"));
    let o = bin().args(["bound", "--s", "3", "--format", "json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exponent"], 108);
    assert_eq!(v["binom_factor"], "300");
    assert_eq!(code(&bin().args(["bound", "--s", "0"]).output().unwrap()), 2);
}
