use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ak"))
        .args(args)
        .env("AK_THREADS", "2")
        .output()
        .expect("run ak")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SPHERE4: &str =
    "dim 4\nvertices 6\n1 2 3 4 5\n0 2 3 4 5\n0 1 3 4 5\n0 1 2 4 5\n0 1 2 3 5\n0 1 2 3 4\n";
const TORUS: &str = "dim 2\nvertices 7\n\
0 1 3\n1 2 4\n2 3 5\n3 4 6\n0 4 5\n1 5 6\n0 2 6\n\
0 2 3\n1 3 4\n2 4 5\n3 5 6\n0 4 6\n0 1 5\n1 2 6\n";

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn fvector_of_the_simplex_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s4.fct", SPHERE4);
    let out = ak(&["fvector", "--in", &s]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "6 15 20 15 6");
    assert!(String::from_utf8_lossy(&out.stderr).contains("manifest: "));
}

#[test]
fn homology_of_the_simplex_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s4.fct", SPHERE4);
    let v = json(&ak(&["homology", "--in", &s]));
    assert_eq!(v["schema"], "ak/1");
    assert_eq!(v["homology"]["betti"], serde_json::json!([1, 0, 0, 0, 1]));
}

#[test]
fn generate_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ak3.fct");
    let manifest = dir.path().join("manifest.json");
    let g = ak(&[
        "generate",
        "--r",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["outputs"].as_array().unwrap().len(), 1);
    let v = ak(&["verify", "--in", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(json(&v)["passed"], true);
    let f = ak(&["fvector", "--in", out.to_str().unwrap()]);
    assert_eq!(
        String::from_utf8_lossy(&f.stdout).trim(),
        "304 4806 16204 19500 7800"
    );
}

#[test]
fn verify_rejects_the_torus() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "torus.fct", TORUS);
    let out = ak(&["verify", "--in", &t]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.fct", "dim 2\nvertices 3\n0 1\n");
    assert_eq!(ak(&["fvector", "--in", &bad]).status.code(), Some(2));
    assert_eq!(
        ak(&["fvector", "--in", "/nonexistent.fct"]).status.code(),
        Some(2)
    );
}

#[test]
fn morse_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "torus.fct", TORUS);
    let runs: Vec<Value> = ["1", "3"]
        .iter()
        .map(|w| {
            json(&ak(&[
                "morse",
                "--in",
                &t,
                "--runs",
                "50",
                "--seed",
                "5",
                "--workers",
                w,
            ]))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0]["morse"]["runs"], 50);
}

#[test]
fn flips_reports_schema_and_options() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s4.fct", SPHERE4);
    let v = json(&ak(&[
        "flips",
        "--in",
        &s,
        "--budget",
        "100",
        "--schedule",
        "g:0.99,0.02",
    ]));
    assert_eq!(v["schema"], "ak/1");
    assert_eq!(v["flips"]["success"], true);
    assert_eq!(v["flips"]["moves"], 0);
    assert!(
        ak(&["flips", "--in", &s, "--schedule", "linear"])
            .status
            .code()
            == Some(2)
    );
}

#[test]
fn pi1_prints_a_presentation() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "torus.fct", TORUS);
    let out = ak(&["pi1", "--in", &t]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("gens: "));
    let gens = text.lines().next().unwrap().split_whitespace().count() - 1;
    assert_eq!(gens, 2);
    assert_eq!(text.lines().filter(|l| l.starts_with("rel: ")).count(), 1);
    let j = dir.path().join("pi1.json");
    assert!(ak(&["pi1", "--in", &t, "--json", j.to_str().unwrap()])
        .status
        .success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(j).unwrap()).unwrap();
    assert_eq!(v["abelianization"], "Z^2");
}
