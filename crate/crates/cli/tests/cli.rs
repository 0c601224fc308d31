use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dagcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dagcut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const BELL: &str =
    r#"{"qubits":2,"gates":[{"name":"H","qubits":[0]},{"name":"CX","qubits":[0,1]}]}"#;

const SINGLE_EDGE: &str = r#"{"vertices":[{"id":0,"kind":"input","label":"a"},{"id":1,"kind":"output","label":"b"}],
    "edges":[{"id":0,"src":0,"dst":1}]}"#;

#[test]
fn single_edge_is_legal() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", SINGLE_EDGE);
    let o = dagcut(&["validate", s(&g)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["schema"], "dagcut/1");
    assert_eq!(v["kind"], "validation");
    assert_eq!(v["t"], 1);
    assert_eq!(v["valid"], true);
}

#[test]
fn forest_reduction_without_cuts_is_no() {
    let d = TempDir::new().unwrap();
    let inst = d.path().join("i.json");
    let o = dagcut(&[
        "gen",
        "--family",
        "g0",
        "--a",
        "5,5,5,5,5,7",
        "--B",
        "16",
        "-o",
        s(&inst),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = dagcut(&[
        "solve",
        "--graph",
        s(&inst),
        "-k",
        "16",
        "--alpha",
        "2",
        "--beta",
        "0",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["answer"], "no");
}

#[test]
fn yes_instance_solves_and_plans() {
    let d = TempDir::new().unwrap();
    let inst = d.path().join("i.json");
    let sol = d.path().join("s.json");
    let o = dagcut(&[
        "gen",
        "--family",
        "g0",
        "--a",
        "4,4,4,4,4,4",
        "-o",
        s(&inst),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = dagcut(&["solve", "--graph", s(&inst), "-o", s(&sol)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(v["answer"], "yes");
    let o = dagcut(&["plan", "--graph", s(&inst), "--solution", s(&sol)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let p = json(&o);
    assert_eq!(p["kind"], "plan");
    assert_eq!(p["K"], 0);
}

#[test]
fn bell_verifies_through_one_cut() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "bell.json", BELL);
    for obs in ["ZZ", "XX", "YY", "ZI"] {
        let o = dagcut(&["verify", "--circuit", s(&c), "--cuts", "1", "--obs", obs]);
        assert_eq!(code(&o), 0, "{obs}: {}", String::from_utf8_lossy(&o.stderr));
        let v = json(&o);
        assert_eq!(v["K"], 1);
        assert!(v["abs_diff"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn knit_opt_answers_and_respects_budget() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "bell.json", BELL);
    let o = dagcut(&["knit-opt", "--graph", s(&c), "-Q", "1", "--pmax", "2"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["answer"], "no");
    let o = dagcut(&["knit-opt", "--graph", s(&c), "-Q", "2", "--pmax", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["total_cuts"], 0);
}

#[test]
fn smtlib_export_is_written() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "bell.json", BELL);
    let m = d.path().join("m.smt2");
    let o = dagcut(&[
        "knit-opt",
        "--graph",
        s(&c),
        "-Q",
        "2",
        "--pmax",
        "2",
        "--backend",
        "smtlib",
        "--emit",
        s(&m),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&m).unwrap();
    assert!(text.contains("(set-logic QF_LIA)"));
    assert!(text.contains("(check-sat)"));
}

#[test]
fn every_emitted_document_validates() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "bell.json", BELL);
    let out = |n: &str| d.path().join(n);
    let runs: Vec<(PathBuf, Vec<String>)> = vec![
        (
            out("inst.json"),
            vec!["gen", "--family", "connected", "--a", "4,4,4,4,4,4"],
        ),
        (
            out("dag.json"),
            vec!["gen", "--family", "random", "--seed", "9"],
        ),
        (out("val.json"), vec!["validate", s(&c)]),
        (
            out("gd.json"),
            vec![
                "solve",
                "--graph",
                s(&c),
                "-k",
                "2",
                "--alpha",
                "1",
                "--beta",
                "0",
            ],
        ),
        (
            out("part.json"),
            vec!["knit-opt", "--graph", s(&c), "-Q", "2", "--pmax", "2"],
        ),
        (
            out("plan.json"),
            vec!["plan", "--graph", s(&c), "--cuts", "1"],
        ),
        (
            out("ver.json"),
            vec!["verify", "--circuit", s(&c), "--cuts", "1", "--obs", "XX"],
        ),
        (out("paths.json"), vec!["paths", "--graph", s(&c)]),
    ]
    .into_iter()
    .map(|(p, a)| (p, a.into_iter().map(String::from).collect()))
    .collect();
    for (path, mut args) in runs {
        args.extend(["-o".to_string(), s(&path).to_string()]);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = dagcut(&refs);
        assert!(
            code(&o) == 0,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let o = dagcut(&["validate", s(&path)]);
        assert_eq!(
            code(&o),
            0,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(json(&o)["valid"], true);
    }
}

#[test]
fn output_is_deterministic() {
    let d = TempDir::new().unwrap();
    let inst = d.path().join("i.json");
    dagcut(&[
        "gen",
        "--family",
        "gbeta",
        "--a",
        "4,4,4,4,4,4",
        "--beta",
        "2",
        "-o",
        s(&inst),
    ]);
    for args in [
        vec!["solve", "--graph", s(&inst)],
        vec!["knit-opt", "--graph", s(&inst), "-Q", "8", "--pmax", "4"],
        vec!["gen", "--family", "random", "--seed", "17"],
        vec!["export-dot", "--graph", s(&inst)],
    ] {
        let a = dagcut(&args);
        let b = dagcut(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn invalid_inputs_exit_two() {
    let d = TempDir::new().unwrap();
    let cyclic = write(
        &d,
        "cyc.json",
        r#"{"vertices":[{"id":0,"kind":"gate","label":"a"},{"id":1,"kind":"gate","label":"b"}],
            "edges":[{"id":0,"src":0,"dst":1},{"id":1,"src":1,"dst":0}]}"#,
    );
    let junk = write(&d, "junk.json", "not json");
    let schema = write(&d, "v2.json", r#"{"schema":"dagcut/2","kind":"dag"}"#);
    let bell = write(&d, "bell.json", BELL);
    for args in [
        vec!["validate", s(&cyclic)],
        vec!["validate", s(&junk)],
        vec!["validate", s(&schema)],
        vec!["solve", "--graph", s(&bell)],
        vec!["verify", "--circuit", s(&bell), "--obs", "ZZZ"],
        vec![
            "verify",
            "--circuit",
            s(&bell),
            "--cuts",
            "99",
            "--obs",
            "ZZ",
        ],
    ] {
        let o = dagcut(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        let e: Value = serde_json::from_slice(&o.stderr).expect("error envelope");
        assert_eq!(e["kind"], "error");
        assert_eq!(e["schema"], "dagcut/1");
    }
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let d = TempDir::new().unwrap();
    let bell = write(&d, "bell.json", BELL);
    let cfg = write(&d, "c.toml", "k = 2\nalpha = 1\nbeta = 0\n");
    let o = dagcut(&["--config", s(&cfg), "solve", "--graph", s(&bell)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["k"], 2);
    let o = dagcut(&["--config", s(&cfg), "solve", "--graph", s(&bell), "-k", "1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["k"], 1);
    let bad = write(&d, "bad.toml", "colour = 3\n");
    let o = dagcut(&["--config", s(&bad), "solve", "--graph", s(&bell)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn zero_threads_is_rejected() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "g.json", SINGLE_EDGE);
    assert_eq!(code(&dagcut(&["--threads", "0", "validate", s(&g)])), 2);
    assert_eq!(code(&dagcut(&["--threads", "4", "validate", s(&g)])), 0);
}
