//! Runs the binary on the fixtures and compares stdout with tests/golden/.
//! `elapsed_ms` is blanked before comparing. Set UPDATE_GOLDEN=1 to rewrite
//! the golden files.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pattern-csp"))
        .args(args)
        .current_dir(dir("fixtures"))
        .output()
        .expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).unwrap())
}

fn normalize(stdout: &str) -> String {
    match serde_json::from_str::<Value>(stdout) {
        Ok(mut v) => {
            if let Some(e) = v.get_mut("elapsed_ms") {
                *e = Value::from(0);
            }
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        Err(_) => stdout.to_string(),
    }
}

fn golden(name: &str, args: &[&str], expected_code: i32) {
    let (code, stdout) = run(args);
    let got = normalize(&stdout);
    assert_eq!(code, expected_code, "{name}: exit code\n{got}");
    let path = dir("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "{name} differs from golden output");
}

#[test]
fn classify_tractable_reference() {
    golden("classify_t4.json", &["classify", "t4.json"], 0);
}

#[test]
fn classify_intractable_reference() {
    golden("classify_z.json", &["classify", "z.json"], 1);
}

#[test]
fn classify_malformed_pattern() {
    golden("classify_malformed.json", &["classify", "malformed.json"], 2);
}

#[test]
fn classify_dot_output() {
    golden("classify_t4.dot", &["classify", "--dot", "t4.json"], 0);
}

#[test]
fn classify_missing_file() {
    golden("classify_missing.json", &["classify", "no-such-file.json"], 2);
}

#[test]
fn solve_trivial_with_oracle() {
    golden("solve_trivial.json", &["solve", "trivial.json", "--class", "T4", "--check-free", "--oracle"], 0);
}

#[test]
fn solve_generated_free_instance() {
    golden("solve_t3_free.json", &["solve", "t3_free.json", "--class", "T3", "--check-free", "--oracle"], 0);
}

#[test]
fn solve_refuses_instance_with_pattern() {
    golden("solve_k4_t3.json", &["solve", "k4_zfree.json", "--class", "T3", "--check-free"], 2);
}

#[test]
fn solve_unknown_class() {
    golden("solve_unknown_class.json", &["solve", "trivial.json", "--class", "T9"], 2);
}

#[test]
fn occurs_absent() {
    golden("occurs_absent.json", &["occurs", "t4.json", "trivial.json"], 0);
}

#[test]
fn occurs_present() {
    golden("occurs_present.json", &["occurs", "t4.json", "k4_zfree.json"], 1);
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "random-free", "--class", "T3", "--n", "5", "--d", "3", "--density", "0.6", "--seed", "11"];
    let (code, stdout) = run(&args);
    assert_eq!(code, 0);
    let fixture = std::fs::read_to_string(dir("fixtures").join("t3_free.json")).unwrap();
    assert_eq!(stdout, fixture);
}

#[test]
fn generate_from_files() {
    golden("generate_sat1.json", &["generate", "sat1", "--cnf", "phi.cnf"], 0);
    golden("generate_zfree_stdout.json", &["generate", "z-free", "--from-graph", "k4.edges"], 0);
    let (code, stdout) = run(&["generate", "z-free", "--from-graph", "k4.edges"]);
    assert_eq!(code, 0);
    let fixture = std::fs::read_to_string(dir("fixtures").join("k4_zfree.json")).unwrap();
    let a: Value = serde_json::from_str(&stdout).unwrap();
    let b: Value = serde_json::from_str(&fixture).unwrap();
    assert_eq!(a, b);
}

#[test]
fn generate_rejects_intractable_class() {
    golden("generate_bad_class.json", &["generate", "random-free", "--class", "Z", "--n", "3", "--d", "2"], 2);
}

#[test]
fn two_v_free_records_its_source() {
    let (code, stdout) = run(&["generate", "2v-free", "--from-instance", "trivial.json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["provenance"]["generator"], "2v-free");
    assert_eq!(v["provenance"]["params"]["source"], "trivial.json");
}

#[test]
fn generate_to_file_prints_report() {
    let out = std::env::temp_dir().join(format!("pattern-csp-gen-{}.json", std::process::id()));
    let (code, stdout) = run(&["generate", "sat1", "--cnf", "phi.cnf", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let written = std::fs::read_to_string(&out).unwrap();
    std::fs::remove_file(&out).ok();
    assert_eq!(report["result"]["generator"], "sat1");
    assert_eq!(report["inputs"][0]["path"], "phi.cnf");
    let inst: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(inst["variables"].as_array().unwrap().len(), report["result"]["variables"].as_u64().unwrap() as usize);
}
