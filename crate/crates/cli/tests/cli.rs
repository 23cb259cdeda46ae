//! End-to-end tests of the `hjnet` binary: exit codes, report content
//! and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hjnet"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn validate_triangle() {
    let out = run(&["validate", data("triangle.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("3 vertices"), "{text}");
    assert!(text.contains("a0 = -1"), "{text}");
    assert!(text.contains("tolerances:"), "{text}");
}

#[test]
fn validate_bad_reference_exits_2() {
    let out = run(&["validate", data("bad_reference.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("arc 0"), "{}", stderr(&out));
}

#[test]
fn critical_triangle_prints_minus_one() {
    let out = run(&["critical", data("triangle.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("critical value c = -1"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn critical_loop_prints_one() {
    let out = run(&["critical", data("loop.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("critical value"))
        .expect("critical line");
    let value: f64 = line.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!((value - 1.0).abs() < 1e-6, "{line}");
}

#[test]
fn critical_json_is_a_bundle() {
    let out = run(&[
        "critical",
        data("triangle.json").to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["format_version"], 1);
    assert!((value["critical_value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
}

#[test]
fn aubry_triangle_report() {
    let out = run(&["aubry", data("triangle.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("aubry edges: e0 e1"), "{text}");
    assert!(text.contains("projected aubry set: v0 v1"), "{text}");
    assert!(text.contains("static class 0: v0 v1"), "{text}");
    assert!(
        text.contains("a0: in aubry set (forward+backward)"),
        "{text}"
    );
    assert!(text.contains("a1: not in aubry set"), "{text}");
    assert!(text.contains("margin histogram"), "{text}");
}

#[test]
fn distance_between_vertices() {
    let out = run(&[
        "distance",
        data("triangle.json").to_str().unwrap(),
        "--level",
        "0",
        "--from",
        "x1",
        "--to",
        "x2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("= 1"), "{}", stdout(&out));
}

#[test]
fn distance_between_interior_points() {
    let out = run(&[
        "distance",
        data("triangle.json").to_str().unwrap(),
        "--level",
        "critical",
        "--from",
        "0@0.25",
        "--to",
        "1@0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn distance_below_critical_exits_4() {
    let out = run(&[
        "distance",
        data("triangle.json").to_str().unwrap(),
        "--level",
        "-2.5",
        "--from",
        "0",
        "--to",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn solve_critical_and_outputs() {
    let dir = std::env::temp_dir().join("hjnet-cli-solve-test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_critical.json").to_str().unwrap(),
        "--level",
        "critical",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("u(v0) = 0"), "{text}");
    assert!(text.contains("u(v1) = 0"), "{text}");
    assert!(text.contains("u(v2) = 1"), "{text}");
    let bundle = std::fs::read_to_string(dir.join("bundle.json")).unwrap();
    assert!(bundle.contains("\"critical_value\""));
    assert!(bundle.contains("\"profiles\""));
    let csv = std::fs::read_to_string(dir.join("profiles.csv")).unwrap();
    assert!(csv.starts_with("arc_id,s,value,branch\n"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn solve_inadmissible_exits_3() {
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_inadmissible.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("v1"), "{}", stderr(&out));
}

#[test]
fn solve_below_critical_exits_4() {
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_below_critical.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn solve_supercritical_from_file_level() {
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_supercritical.json").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("level a = 0.5"), "{text}");
}

#[test]
fn solve_level_disagreement_exits_2() {
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_supercritical.json").to_str().unwrap(),
        "--level",
        "0.75",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn solve_point_trace() {
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_point.json").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn reports_are_byte_deterministic() {
    let args = ["critical", "--json"];
    let path = data("triangle.json");
    let run1 = bin().arg(args[0]).arg(&path).arg(args[1]).output().unwrap();
    let run2 = bin().arg(args[0]).arg(&path).arg(args[1]).output().unwrap();
    assert!(run1.status.success());
    assert_eq!(run1.stdout, run2.stdout);
}

#[test]
fn solve_is_byte_deterministic() {
    let dir1 = std::env::temp_dir().join("hjnet-cli-det-1");
    let dir2 = std::env::temp_dir().join("hjnet-cli-det-2");
    for dir in [&dir1, &dir2] {
        let _ = std::fs::remove_dir_all(dir);
        let out = run(&[
            "solve",
            data("triangle.json").to_str().unwrap(),
            "--trace",
            data("trace_critical.json").to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let b1 = std::fs::read(dir1.join("bundle.json")).unwrap();
    let b2 = std::fs::read(dir2.join("bundle.json")).unwrap();
    assert_eq!(b1, b2);
    let c1 = std::fs::read(dir1.join("profiles.csv")).unwrap();
    let c2 = std::fs::read(dir2.join("profiles.csv")).unwrap();
    assert_eq!(c1, c2);
    let _ = std::fs::remove_dir_all(&dir1);
    let _ = std::fs::remove_dir_all(&dir2);
}

#[test]
fn sample_produces_requested_rows() {
    let dir = std::env::temp_dir().join("hjnet-cli-sample-test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_critical.json").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&[
        "sample",
        data("triangle.json").to_str().unwrap(),
        "--solution",
        dir.join("bundle.json").to_str().unwrap(),
        "--resolution",
        "101",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "arc_id,s,value,branch");
    assert_eq!(lines.len(), 1 + 3 * 101);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sample_resamples_point_anchored_solutions() {
    let dir = std::env::temp_dir().join("hjnet-cli-sample-point-test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = run(&[
        "solve",
        data("triangle.json").to_str().unwrap(),
        "--trace",
        data("trace_point.json").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&[
        "sample",
        data("triangle.json").to_str().unwrap(),
        "--solution",
        dir.join("bundle.json").to_str().unwrap(),
        "--resolution",
        "41",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 3 * 41);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn check_modes_and_exit_codes() {
    let out = run(&[
        "check",
        data("triangle.json").to_str().unwrap(),
        "--function",
        data("function_solution.json").to_str().unwrap(),
        "--level",
        "critical",
        "--mode",
        "sol",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("solution check: pass"));

    // not a solution at level 0, but a valid subsolution
    let out = run(&[
        "check",
        data("triangle.json").to_str().unwrap(),
        "--function",
        data("function_not_solution.json").to_str().unwrap(),
        "--level",
        "0",
        "--mode",
        "sol",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("solution check: fail"));

    let out = run(&[
        "check",
        data("triangle.json").to_str().unwrap(),
        "--function",
        data("function_not_solution.json").to_str().unwrap(),
        "--level",
        "0",
        "--mode",
        "sub",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("subsolution check: pass"));
}

#[test]
fn tolerance_env_override_is_echoed() {
    let out = bin()
        .args(["critical", data("triangle.json").to_str().unwrap()])
        .env("HJNET_TOL_ZERO", "2e-5")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("tol_zero=2e-5"), "{}", stdout(&out));
}

#[test]
fn tolerance_env_garbage_exits_2() {
    let out = bin()
        .args(["critical", data("triangle.json").to_str().unwrap()])
        .env("HJNET_TOL_A", "warm")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
