use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_krsupport")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn write_problem(dir: &Path, body: &Value) -> PathBuf {
    let p = dir.join("problem.json");
    fs::write(&p, serde_json::to_string_pretty(body).unwrap()).unwrap();
    p
}

fn problem_value(name: &str) -> Value {
    read_json(&fixture(name))
}

#[test]
fn compute_writes_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let f = fixture("n3_r1_p3.json");
    let (code, stdout, _) = run(&["compute", "--problem", f.to_str().unwrap(), "--out", out]);
    assert_eq!(code, 0);
    assert!(stdout.contains("components: 1"), "{stdout}");
    for name in ["support.json", "support.dot", "stages.jsonl", "summary.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let s = read_json(&dir.path().join("summary.json"));
    let c = read_json(&dir.path().join("support.json"));
    assert_eq!(s["vertices"], c["vertices"].as_array().unwrap().len());
    assert_eq!(s["edges"], c["edges"].as_array().unwrap().len());
    assert_eq!(s["valuations"], serde_json::json!([1]));
    let dot = fs::read_to_string(dir.path().join("support.dot")).unwrap();
    assert!(dot.starts_with("graph"), "{dot}");
}

#[test]
fn emit_selects_formats() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("n3_r0_p3.json");
    let (code, _, _) =
        run(&["compute", "--problem", f.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--emit", "dot"]);
    assert_eq!(code, 0);
    assert!(dir.path().join("support.dot").exists());
    assert!(!dir.path().join("support.json").exists());
}

#[test]
fn radius_flag_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("n3_r1_p3.json");
    let (code, _, _) =
        run(&["compute", "--problem", f.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--radius", "1"]);
    assert_eq!(code, 0);
    let s = read_json(&dir.path().join("summary.json"));
    assert_eq!(s["window"]["radius"], 1);
}

#[test]
fn oracle_check_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("n3_r1_p3.json");
    let (code, stdout, _) =
        run(&["oracle-check", "--problem", f.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("consistent"));
    let r = read_json(&dir.path().join("report.json"));
    assert!(r["discrepancies"].as_array().unwrap().is_empty());
    assert_eq!(r["support_size"], r["algorithm_size"]);
}

#[test]
fn missing_file_is_an_ingest_error() {
    let (code, _, err) = run(&["compute", "--problem", "/nonexistent/problem.json"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn even_determinant_is_rejected_at_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = problem_value("n3_r1_p3.json");
    v["gram"][2][2] = serde_json::json!([9, 1, 0, 1]);
    v["vectors"] = serde_json::json!([[[0, 1, 0, 1], [0, 1, 0, 1], [3, 1, 0, 1]]]);
    let p = write_problem(dir.path(), &v);
    let (code, _, err) =
        run(&["oracle-check", "--problem", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("determinant"), "{err}");
}

#[test]
fn malformed_scalar_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = problem_value("n3_r1_p3.json");
    v["vectors"][0][1] = serde_json::json!([0, 1, 0]);
    let p = write_problem(dir.path(), &v);
    let (code, _, err) = run(&["compute", "--problem", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("vectors[0][1]"), "{err}");
}

#[test]
fn injected_fault_is_a_discrepancy_naming_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("n3_m2_p3.json");
    let (code, stdout, _) = run(&[
        "oracle-check",
        "--problem",
        f.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--fault-phi-stage",
        "0",
    ]);
    assert_eq!(code, 3, "{stdout}");
    assert!(stdout.contains("DISCREPANCY"), "{stdout}");
    assert!(stdout.contains("stage S_0"), "{stdout}");
    let r = read_json(&dir.path().join("report.json"));
    assert!(!r["discrepancies"].as_array().unwrap().is_empty());
}

#[test]
fn caps_are_a_clean_limit_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = problem_value("n3_r1_p3.json");
    v["caps"] = serde_json::json!({"max_vertices": 10, "max_distance_search": 10});
    let p = write_problem(dir.path(), &v);
    let (code, _, err) = run(&["compute", "--problem", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("cap exceeded"), "{err}");
}

#[test]
fn radius_is_required_for_partial_tuples() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = problem_value("n3_r1_p3.json");
    v.as_object_mut().unwrap().remove("window");
    let p = write_problem(dir.path(), &v);
    let (code, _, err) = run(&["compute", "--problem", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn census_counts_for_r1() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("n3_r1_p3.json");
    let (code, _, err) = run(&["census", "--problem", f.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let c = read_json(&dir.path().join("census.json"));
    let tally = c["tally"].as_array().unwrap();
    assert_eq!(tally.len(), 1);
    assert_eq!(tally[0]["subvertices"], 28);
    assert_eq!(tally[0]["all_above_in_support"], 4);
    assert_eq!(tally[0]["exactly_one_above"], 24);
}

#[test]
fn full_closure_reports_irreducibility() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("full_01_p3.json");
    let (code, _, err) = run(&["compute", "--problem", f.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let s = read_json(&dir.path().join("summary.json"));
    assert_eq!(s["finite"], true);
    assert_eq!(s["irreducible"], true);
    assert_eq!(s["maximal_vertices"], 1);
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let f = fixture("n3_m2_p3.json");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, t) in [(&a, "1"), (&b, "2")] {
        let (code, _, err) =
            run(&["compute", "--problem", f.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--threads", t]);
        assert_eq!(code, 0, "{err}");
    }
    for name in ["support.json", "support.dot", "stages.jsonl", "summary.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn predicate_only_skips_the_staged_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("n3_r1_p3.json");
    let (code, stdout, _) = run(&[
        "oracle-check",
        "--problem",
        f.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--predicate-only",
    ]);
    assert_eq!(code, 0, "{stdout}");
    let r = read_json(&dir.path().join("report.json"));
    assert!(r["algorithm_size"].is_null());
    assert!(r["stages"].as_array().unwrap().is_empty());
    assert!(r["support_size"].as_u64().unwrap() > 0);
}

#[test]
fn predicate_only_needs_a_window() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("full_01_p3.json");
    let (code, _, err) = run(&[
        "oracle-check",
        "--problem",
        f.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--predicate-only",
    ]);
    assert_eq!(code, 2, "{err}");
}
