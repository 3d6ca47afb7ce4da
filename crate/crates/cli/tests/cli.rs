use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use symnorm::jobs::recertify_normalizer;
use tempfile::TempDir;

fn symnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_job(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_json(body: &str, extra: &[&str]) -> (Value, i32) {
    let dir = TempDir::new().unwrap();
    let job = write_job(dir.path(), "job.json", body);
    let mut args = vec!["--input", job.as_str()];
    args.extend_from_slice(extra);
    let out = symnorm(&args);
    let report: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (report, out.status.code().unwrap())
}

const GLANCING: &str = r#"{"command": "glancing-check", "n": 1, "order": 4,
    "inputs": {"f": "y", "h": "x^2 + y + p1"}}"#;

const MELROSE: &str = r#"{"command": "normalize-pair", "n": 1, "order": 6,
    "inputs": {"f": "y", "h": "x^2 + y + p1"}}"#;

const GENERIC: &str = r#"{"command": "normalize-pair", "n": 1, "order": 8,
    "inputs": {"f": "y + p1 q1 + x^2 q1",
               "h": "x^2 + y + p1 + q1 y + 2 y^2 + x y q1 + p1 y^2 + q1^2 y^3 + x^3"}}"#;

#[test]
fn glancing_check_reports_s1() {
    let (report, code) = run_json(GLANCING, &[]);
    assert_eq!(code, 0);
    assert_eq!(report["status"], "success");
    assert_eq!(report["outputs"]["in_s1"], true);
}

#[test]
fn identity_diffeo_has_zero_residuals() {
    let body = r#"{"command": "normalize-diffeo", "n": 1, "order": 4,
        "inputs": {"map": ["p1", "q1"]}}"#;
    let (report, code) = run_json(body, &[]);
    assert_eq!(code, 0);
    let q = &report["outputs"]["q_tilde"][0]["terms"];
    assert_eq!(q, &serde_json::json!([["1", "1", [0, 1]]]));
    for r in report["residuals"].as_object().unwrap().values() {
        assert_eq!(r[0], "0");
    }
    assert!(recertify_normalizer(&report).unwrap());
}

#[test]
fn melrose_pair_is_a_domain_error() {
    let (report, code) = run_json(MELROSE, &[]);
    assert_eq!(code, 2);
    assert_eq!(report["status"], "error");
    assert_eq!(report["error"]["kind"], "GenericityViolation");
}

#[test]
fn generic_pair_recertifies_after_reload() {
    let (report, code) = run_json(GENERIC, &[]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["status"], "success");
    assert!(report["certified_order"].as_u64().unwrap() >= 1);
    assert!(recertify_normalizer(&report).unwrap());
}

#[test]
fn low_order_pair_is_malformed() {
    let (report, code) = run_json(GENERIC, &["--order", "3"]);
    assert_eq!(code, 1);
    assert_eq!(report["job"]["order"], 3);
    assert_eq!(report["error"]["kind"], "ParseError");
}

#[test]
fn malformed_jobs_exit_one() {
    let cases = [
        "{ not json",
        r#"{"command": "frobnicate"}"#,
        r#"{"command": "glancing-check", "n": 1, "inputs": {"f": "y +* 2", "h": "y"}}"#,
        r#"{"command": "glancing-check", "n": 1, "extra": 1}"#,
        r#"{"command": "normalize-diffeo", "n": 1, "inputs": {"map": ["p1"]}}"#,
    ];
    for body in cases {
        let (report, code) = run_json(body, &[]);
        assert_eq!(code, 1, "{body}");
        assert_eq!(report["status"], "error");
    }
    let (report, _) = run_json("{\n  \"command\": 7\n}", &[]);
    let msg = report["error"]["message"].as_str().unwrap();
    assert!(msg.contains("line 2"), "{msg}");
}

#[test]
fn missing_input_file_exits_one() {
    let out = symnorm(&["--input", "/nonexistent/job.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let job = write_job(dir.path(), "pair.json", GENERIC);
    let a = symnorm(&["-i", &job, "--seed", "9"]).stdout;
    let b = symnorm(&["-i", &job, "--seed", "9"]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn text_format_and_output_file() {
    let dir = TempDir::new().unwrap();
    let job = write_job(dir.path(), "g.json", GLANCING);
    let dest = dir.path().join("g.txt");
    let out = symnorm(&["-i", &job, "-o", dest.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(dest).unwrap();
    assert!(text.contains("in_s1: true"));
    assert!(text.contains("status: success"));
}

#[test]
fn job_directory_fans_out() {
    let dir = TempDir::new().unwrap();
    write_job(dir.path(), "a.json", GLANCING);
    write_job(dir.path(), "b.json", MELROSE);
    write_job(dir.path(), "c.json", GENERIC);
    let out_dir = dir.path().join("reports");
    let out = symnorm(&[
        "--jobs",
        dir.path().to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
        "--workers",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    for (stem, status) in [("a", "success"), ("b", "error"), ("c", "success")] {
        let text = fs::read_to_string(out_dir.join(format!("{stem}.report.json"))).unwrap();
        let report: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(report["status"], status, "{stem}");
    }
    let single = symnorm(&["-i", dir.path().join("c.json").to_str().unwrap()]).stdout;
    let fanned = fs::read(out_dir.join("c.report.json")).unwrap();
    assert_eq!(single, fanned);
}

#[test]
fn help_lists_flags() {
    let out = symnorm(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--jobs"));
}
