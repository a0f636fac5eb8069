//! Acceptance criteria 1 to 10, one PASS/FAIL line each, over the fixture matrix.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use krsupport_core::building::FiniteHermSpace;
use krsupport_core::oracle::naive_isotropic_count;
use krsupport_core::scalars::{FqScalar, PadicContext};
use serde_json::Value;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Fixture names (file stems) in `dir`, sorted.
fn fixtures(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().into_string().unwrap();
            name.strip_suffix(".json").map(String::from)
        })
        .collect();
    v.sort();
    v
}

fn run(cmd: &str, problem: &Path, out: &Path, extra: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_krsupport"))
        .arg(cmd)
        .arg("--problem")
        .arg(problem)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs");
    let text = format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    (o.status.code().unwrap_or(-1), text)
}

fn read_json(p: &Path) -> Option<Value> {
    serde_json::from_str(&fs::read_to_string(p).ok()?).ok()
}

struct Criterion {
    failures: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Self { failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

struct FixtureRun {
    /// False for fixtures checked by predicate filtering alone.
    staged: bool,
    oracle_code: i32,
    oracle_text: String,
    report: Option<Value>,
    summary: Option<Value>,
    deterministic: Result<(), String>,
}

const EXPORTS: [&str; 4] = ["support.json", "support.dot", "stages.jsonl", "summary.json"];

fn run_fixture(problem: &Path, out: &Path) -> FixtureRun {
    let o = out.join("oracle");
    let a = out.join("t1");
    let b = out.join("t2");
    let (oracle_code, oracle_text) = run("oracle-check", problem, &o, &["--threads", "1"]);
    let (ca, ta) = run("compute", problem, &a, &["--threads", "1"]);
    let (cb, tb) = run("compute", problem, &b, &["--threads", "2"]);
    let deterministic = if ca != 0 || cb != 0 {
        Err(format!("compute failed: {ta} {tb}"))
    } else {
        EXPORTS
            .iter()
            .find(|f| fs::read(a.join(f)).ok() != fs::read(b.join(f)).ok())
            .map_or(Ok(()), |f| Err(format!("{f} differs")))
    };
    FixtureRun {
        staged: true,
        oracle_code,
        oracle_text,
        report: read_json(&o.join("report.json")),
        summary: read_json(&a.join("summary.json")),
        deterministic,
    }
}

fn run_predicate_only(problem: &Path, out: &Path) -> FixtureRun {
    let o = out.join("oracle");
    let (oracle_code, oracle_text) = run("oracle-check", problem, &o, &["--predicate-only"]);
    FixtureRun {
        staged: false,
        oracle_code,
        oracle_text,
        report: read_json(&o.join("report.json")),
        summary: None,
        deterministic: Ok(()),
    }
}

fn discrepancies<'a>(r: &'a FixtureRun, check: &str) -> Vec<&'a str> {
    r.report
        .as_ref()
        .and_then(|v| v["discrepancies"].as_array())
        .map(|ds| ds.iter().filter(|d| d["check"] == check).filter_map(|d| d["detail"].as_str()).collect())
        .unwrap_or_default()
}

fn isotropic_counts(c: &mut Criterion) {
    for p in [3u64, 5] {
        let fq = PadicContext::with_default_eps(p).unwrap().residue_field();
        let s = |a, b| FqScalar::new(a, b);
        let m = (p - 1) as u32;
        let grams: Vec<Vec<Vec<FqScalar>>> = vec![
            vec![vec![s(0, 0), s(1, 0)], vec![s(1, 0), s(0, 0)]],
            vec![vec![s(1, 0), s(0, 1)], vec![s(0, m), s(2, 0)]],
            vec![vec![s(0, 0), s(1, 0), s(0, 0)], vec![s(1, 0), s(0, 0), s(0, 0)], vec![s(0, 0), s(0, 0), s(2, 0)]],
            vec![vec![s(1, 0), s(0, 1), s(0, 0)], vec![s(0, m), s(2, 0), s(1, 0)], vec![s(0, 0), s(1, 0), s(2, 0)]],
        ];
        let mut spaces = vec![FiniteHermSpace::standard(fq, 2), FiniteHermSpace::standard(fq, 3)];
        for g in grams {
            match FiniteHermSpace::new(fq, g) {
                Ok(v) => spaces.push(v),
                Err(e) => c.check(false, || format!("p={p}: form rejected: {e}")),
            }
        }
        for v in &spaces {
            let d = v.dim();
            let want = if d == 2 { p + 1 } else { p * p * p + 1 };
            let naive = naive_isotropic_count(v, 1, 1 << 20).unwrap();
            let listed = v.isotropic_subspaces(1).len() as u64;
            c.check(naive == want && listed == want, || {
                format!("p={p} d={d}: naive {naive}, listed {listed}, want {want}")
            });
        }
    }
}

fn census_tallies(r: &FixtureRun) -> Vec<(u64, u64, u64)> {
    r.report
        .as_ref()
        .and_then(|v| v["census"].as_array())
        .map(|ts| {
            ts.iter()
                .map(|t| {
                    (
                        t["subvertices"].as_u64().unwrap(),
                        t["all_above_in_support"].as_u64().unwrap(),
                        t["exactly_one_above"].as_u64().unwrap(),
                    )
                })
                .collect()
        })
        .unwrap_or_default()
}

fn n4_census(c: &mut Criterion, root: &Path) {
    let out = root.join("census_n4");
    let (code, text) = run("census", &fixtures_dir().join("n4_r1_p3.json"), &out, &[]);
    c.check(code == 0, || format!("census exit {code}: {text}"));
    let Some(v) = read_json(&out.join("census.json")) else {
        c.check(false, || "no census.json".into());
        return;
    };
    let verts = v["vertices"].as_array().cloned().unwrap_or_default();
    c.check(!verts.is_empty(), || "no max-type vertices".into());
    let (mut full, mut one) = (0, 0);
    for e in &verts {
        let id = &e["vertex"];
        c.check(e["subvertices"] == 28, || format!("vertex {id}: {} subvertices", e["subvertices"]));
        c.check(e["subvertex_type"] == 1, || format!("vertex {id}: subvertex type {}", e["subvertex_type"]));
        for pair in e["above"].as_array().unwrap() {
            let (a, k) = (pair[0].as_u64().unwrap(), pair[1].as_u64().unwrap());
            c.check(a == 28 && (k == 28 || k == 1), || format!("vertex {id}: subvertex with {k} of {a} above"));
            full += (k == 28) as usize;
            one += (k == 1) as usize;
        }
    }
    c.check(full > 0 && one > 0, || format!("decomposing {full}, non-decomposing {one}"));
}

/// Expected irreducibility of the full-closure fixtures, from max(n⁺_even, n⁺_odd) ≤ 1.
fn expected_irreducible(name: &str) -> Option<bool> {
    let table = [
        ("full_01_p3", true),
        ("full_23_p3", true),
        ("full_03_p5", true),
        ("full_12_gram_p3", true),
        ("full_111_p3", true),
        ("full_133_p3", false),
        ("full_122_p3", false),
        ("full_023_p5", true),
        ("full_0012_p3", true),
    ];
    table.iter().find(|(n, _)| *n == name).map(|&(_, b)| b)
}

#[test]
fn acceptance() {
    let root = tempfile::tempdir().unwrap();
    let dir = fixtures_dir();
    let mut runs: BTreeMap<String, FixtureRun> = fixtures(&dir)
        .into_iter()
        .map(|n| {
            let r = run_fixture(&dir.join(format!("{n}.json")), &root.path().join(&n));
            (n, r)
        })
        .collect();
    let only = dir.join("predicate_only");
    for n in fixtures(&only) {
        let r = run_predicate_only(&only.join(format!("{n}.json")), &root.path().join(&n));
        runs.insert(n, r);
    }
    let staged: Vec<(&String, &FixtureRun)> = runs.iter().filter(|(_, r)| r.staged).collect();
    let mut results: Vec<(u32, &str, Criterion)> = Vec::new();

    let mut c = Criterion::new();
    isotropic_counts(&mut c);
    results.push((1, "isotropic line counts", c));

    let mut c = Criterion::new();
    let r0 = &runs["n3_r0_p3"];
    let size = r0.report.as_ref().map(|v| v["support_size"].clone());
    c.check(size == Some(Value::from(1)), || format!("support size {size:?}"));
    let types = r0.summary.as_ref().map(|v| v["types"].clone());
    c.check(types == Some(serde_json::json!({"1": 1})), || format!("types {types:?}"));
    results.push((2, "r = 0 support is one type-1 vertex", c));

    let mut c = Criterion::new();
    for n in ["n3_r1_p3", "n3_r1_p3_d3"] {
        let t = census_tallies(&runs[n]);
        c.check(!t.is_empty() && t.iter().all(|&x| x == (28, 4, 24)), || format!("{n}: {t:?}"));
    }
    results.push((3, "r = 1 census for n = 3", c));

    let mut c = Criterion::new();
    n4_census(&mut c, root.path());
    results.push((4, "r = 1 census for n = 4", c));

    let mut c = Criterion::new();
    for (n, r) in &runs {
        c.check(r.report.is_some(), || format!("{n}: no report"));
        let d = discrepancies(r, "kr");
        c.check(d.is_empty(), || format!("{n}: {d:?}"));
    }
    results.push((5, "(a, b) invariants", c));

    let mut c = Criterion::new();
    for n in 3..=5 {
        for r in 1..=3 {
            let name = format!("n{n}_r{r}_p3");
            match runs.get(&name) {
                None => c.check(false, || format!("{name}: missing fixture")),
                Some(fr) => {
                    c.check(fr.report.is_some(), || format!("{name}: no report"));
                    let d = discrepancies(fr, "lemma");
                    c.check(d.is_empty(), || format!("{name}: {d:?}"));
                }
            }
        }
    }
    results.push((6, "lemma conformance", c));

    let mut c = Criterion::new();
    for (n, r) in &runs {
        c.check(r.oracle_code == 0, || format!("{n}: exit {} {}", r.oracle_code, r.oracle_text.trim()));
    }
    for (n, r) in &staged {
        for check in ["support", "algorithm", "stage"] {
            let d = discrepancies(r, check);
            c.check(d.is_empty(), || format!("{n}: {d:?}"));
        }
        if let Some(v) = &r.report {
            c.check(v["algorithm_size"] == v["support_size"], || format!("{n}: sizes differ"));
        }
    }
    results.push((7, "staged computation equals predicate filtering", c));

    let mut c = Criterion::new();
    for (n, r) in &runs {
        let d = discrepancies(r, "connected");
        c.check(d.is_empty(), || format!("{n}: {d:?}"));
    }
    results.push((8, "interior support joined to the seed", c));

    let mut c = Criterion::new();
    let mut full = 0;
    for (n, r) in runs.iter().filter(|(n, _)| n.starts_with("full_")) {
        full += 1;
        let Some(want) = expected_irreducible(n) else {
            c.check(false, || format!("{n}: no expected value"));
            continue;
        };
        let Some(s) = &r.summary else {
            c.check(false, || format!("{n}: no summary"));
            continue;
        };
        c.check(s["finite"] == true, || format!("{n}: closure not finite"));
        c.check(s["irreducible"] == want, || format!("{n}: criterion says {}", s["irreducible"]));
        let unique = s["maximal_vertices"] == 1;
        c.check(unique == want, || {
            format!("{n}: {} maximal vertices, want irreducible = {want}", s["maximal_vertices"])
        });
    }
    c.check(full >= 5, || format!("only {full} full-closure fixtures"));
    results.push((9, "irreducibility criterion", c));

    let mut c = Criterion::new();
    for (n, r) in &staged {
        if let Err(e) = &r.deterministic {
            c.check(false, || format!("{n}: {e}"));
        }
    }
    results.push((10, "exports independent of thread count", c));

    let mut err = std::io::stderr().lock();
    let mut failed = 0;
    for (id, what, c) in &results {
        if c.failures.is_empty() {
            writeln!(err, "criterion {id:>2} PASS  {what}").unwrap();
        } else {
            failed += 1;
            writeln!(err, "criterion {id:>2} FAIL  {what}").unwrap();
            for f in &c.failures {
                writeln!(err, "    {f}").unwrap();
            }
        }
    }
    assert_eq!(failed, 0, "{failed} criteria failed");
}
