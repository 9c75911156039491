use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_entrocone");
const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", self.stdout))
    }
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("ENTROCONE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn validate(schema: &str, instance: &Value) {
    let schema: Value = serde_json::from_str(schema).unwrap();
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}\n{instance}");
}

const EV_SCHEMA: &str = include_str!("../schemas/entropy_vector.schema.json");
const REPORT_SCHEMA: &str = include_str!("../schemas/run_report.schema.json");
const CONE_SCHEMA: &str = include_str!("../schemas/cone.schema.json");
const FACET_SCHEMA: &str = include_str!("../schemas/facet.schema.json");
const TYPES_SCHEMA: &str = include_str!("../schemas/types.schema.json");
const DIFF_SCHEMA: &str = include_str!("../schemas/differential_report.schema.json");
const RANK_SCHEMA: &str = include_str!("../schemas/rank.schema.json");

fn entry(v: &Value, label: &str) -> f64 {
    v["entries"][label].as_f64().unwrap_or_else(|| panic!("no entry {label:?} in {v}"))
}

fn pure(dims: &[usize], re: &[f64], im: &[f64]) -> String {
    json!({ "dims": dims, "amplitudes": { "re": re, "im": im } }).to_string()
}

fn ghz3() -> String {
    let mut re = vec![0.0; 8];
    re[0] = H;
    re[7] = H;
    pure(&[2, 2, 2], &re, &[0.0; 8])
}

fn generic3() -> String {
    let raw: Vec<f64> = (0..16).map(|k| (1.7 * k as f64 + 0.3).sin() + 0.1 * k as f64).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a: Vec<f64> = raw.iter().map(|x| x / norm).collect();
    pure(&[2, 2, 2], &a[..8], &a[8..])
}

#[test]
fn entropy_of_bell_and_correlated_bits() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", &pure(&[2, 2], &[H, 0.0, 0.0, H], &[0.0; 4]));
    let r = run(&["entropy", s(&bell)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    validate(EV_SCHEMA, &v);
    for (label, want) in [("1", 1.0), ("2", 1.0), ("1,2", 0.0)] {
        assert!((entry(&v, label) - want).abs() < 1e-12, "{label}: {v}");
    }

    let corr = write(&dir, "corr.json", r#"{"dims":[2,2],"probs":["1/2",0,0,"1/2"]}"#);
    let v = run(&["entropy", s(&corr)]).json();
    validate(EV_SCHEMA, &v);
    for label in ["1", "2", "1,2"] {
        assert!((entry(&v, label) - 1.0).abs() < 1e-12);
    }
    assert_eq!(run(&["entropy", "--quantum", s(&corr)]).code, 2);
}

#[test]
fn bad_inputs_exit_two_with_diagnostics() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.json", "");
    let r = run(&["entropy", s(&empty)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("empty"), "{}", r.stderr);

    let broken = write(&dir, "broken.json", "{\"dims\": [2], \"probs\": [0.5, }");
    let r = run(&["entropy", s(&broken)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("byte 29"), "{}", r.stderr);

    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["entropy", s(&missing)]).code, 2);
}

#[test]
fn check_accepts_ghz_and_flags_ssa_violation() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "ghz.json", &ghz3());
    let vector = run(&["entropy", s(&state)]);
    let vpath = write(&dir, "ghz.ev.json", &vector.stdout);

    let r = run(&["check", s(&vpath), "--catalog", "3"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let report = r.json();
    validate(REPORT_SCHEMA, &report);
    assert_eq!(report["violations"], json!([]));
    assert!(report["results"]["checked"].as_u64().unwrap() > 0);

    let bad = write(&dir, "ssa.json", r#"{"n":2,"entries":{"1":1,"2":1,"1,2":3}}"#);
    let r = run(&["check", s(&bad)]);
    assert_eq!(r.code, 1);
    let report = r.json();
    validate(REPORT_SCHEMA, &report);
    let violations = report["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1);
    assert!(violations[0]["name"].as_str().unwrap().starts_with("Delta["));
    assert_eq!(violations[0]["value"], json!(-1.0));
}

#[test]
fn check_tolerance_sweep_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let state = write(&dir, "ghz.json", &ghz3());
    let vpath = write(&dir, "ghz.ev.json", &run(&["entropy", s(&state)]).stdout);
    for tol in ["1e-6", "1e-8", "1e-10", "1e-12"] {
        let a = run(&["--tol", tol, "check", s(&vpath)]);
        let b = run(&["--tol", tol, "check", s(&vpath)]);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.code, 0);
        assert_eq!(a.json()["results"]["tol"].as_f64().unwrap(), tol.parse::<f64>().unwrap());
    }
}

#[test]
fn stabilizer_bell_module() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bell.stab", "2 2\n1 1 0 0\n0 0 1 1\n");
    let r = run(&["stab", s(&f)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = r.json();
    validate(REPORT_SCHEMA, &report);
    let v = &report["results"]["entropy_vector"];
    validate(EV_SCHEMA, v);
    assert_eq!(entry(v, "1"), 1.0);
    assert_eq!(entry(v, "2"), 1.0);
    assert_eq!(entry(v, "1,2"), 0.0);
    assert_eq!(report["results"]["lagrangian"], json!(true));
    assert_eq!(report["results"]["exact"]["1,2"], json!("0"));
}

#[test]
fn stabilizer_rejects_non_isotropic_generators() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.stab", "2 2\n1 0 0 0\n0 0 1 0\n");
    let r = run(&["stab", s(&f)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("generators 1 and 2"), "{}", r.stderr);
}

#[test]
fn stabilizer_enumeration_csv_two_qubits() {
    let r = run(&["stab", "--enumerate", "2", "2", "--emit-csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("point,subset_mask,entropy_bits"));
    let mut points: Vec<Vec<String>> = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let k: usize = cols[0].parse().unwrap();
        if k == points.len() {
            points.push(Vec::new());
        }
        points[k].push(cols[2].to_string());
    }
    let set: BTreeSet<Vec<String>> = points.iter().cloned().collect();
    assert_eq!(set.len(), points.len(), "duplicate points");
    // all (S1, S2, S12) with S1, S2 in {0,1} and |S1-S2| <= S12 <= S1+S2
    let want: BTreeSet<Vec<String>> = [[0, 0, 0], [1, 0, 1], [0, 1, 1], [1, 1, 0], [1, 1, 1], [1, 1, 2]]
        .iter()
        .map(|p| p.iter().map(|x| x.to_string()).collect())
        .collect();
    assert_eq!(set, want);

    let j = run(&["stab", "--enumerate", "2", "2"]).json();
    validate(REPORT_SCHEMA, &j);
    assert_eq!(j["results"]["points"].as_array().unwrap().len(), 6);
    assert_eq!(j["results"]["exhaustive"], json!(true));
}

#[test]
fn catalog_dualizes_to_pippenger_rays() {
    let dir = TempDir::new().unwrap();
    let cat = run(&["catalog", "3"]);
    let catalog = cat.json();
    validate(CONE_SCHEMA, &catalog);
    let cpath = write(&dir, "xi3.json", &cat.stdout);
    let r = run(&["cone", s(&cpath), "--dualize"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let dual = r.json();
    validate(CONE_SCHEMA, &dual);
    let names: Vec<&str> = dual["generator_names"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(names.len(), 12);
    assert_eq!(names.iter().filter(|n| n.starts_with("Delta[")).count(), 6);
    assert_eq!(names.iter().filter(|n| n.starts_with("E[")).count(), 6);

    let f = run(&["cone", s(&cpath), "--facet", "Delta[{1,3},{2,3}]"]);
    assert_eq!(f.code, 0, "{}", f.stderr);
    let fv = f.json();
    validate(FACET_SCHEMA, &fv);
    assert_eq!(fv["is_facet"], json!(true));
    assert_eq!(fv["face_dimension"], json!(6));
    assert_eq!(fv["cone_dimension"], json!(7));

    let ext = run(&["cone", s(&cpath), "--extremal"]).json();
    validate(CONE_SCHEMA, &ext);
}

#[test]
fn orthant_is_self_dual() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "orth.json", r#"{"n":2,"halfspaces":[[1,0,0],[0,1,0],[0,0,1]]}"#);
    let dual = run(&["cone", s(&f), "--dualize"]).json();
    validate(CONE_SCHEMA, &dual);
    let mut gens: Vec<Value> = dual["generators"].as_array().unwrap().clone();
    gens.sort_by_key(|g| g.to_string());
    assert_eq!(gens, vec![json!([0, 0, 1]), json!([0, 1, 0]), json!([1, 0, 0])]);
}

#[test]
fn facet_check_reports_invalid_functional() {
    let dir = TempDir::new().unwrap();
    let cpath = write(&dir, "xi2.json", &run(&["catalog", "2"]).stdout);
    let r = run(&["cone", s(&cpath), "--facet", "-1,0,0"]);
    assert_eq!(r.code, 1);
    let v = r.json();
    validate(FACET_SCHEMA, &v);
    assert_eq!(v["valid"], json!(false));
}

#[test]
fn types_subcommands() {
    let k = run(&["types", "kostka", "2,1", "1,1,1"]).json();
    validate(TYPES_SCHEMA, &k);
    assert_eq!(k["kostka"], json!(2));

    let size = run(&["types", "size", "32,32"]).json();
    validate(TYPES_SCHEMA, &size);
    assert_eq!(size["size"], json!(1_832_624_140_942_590_534u64));

    let dir = TempDir::new().unwrap();
    let corr = write(&dir, "corr.json", r#"{"dims":[2,2],"probs":["1/2",0,0,"1/2"]}"#);
    let cy = run(&["types", "cy", s(&corr), "--k", "8"]).json();
    validate(TYPES_SCHEMA, &cy);
    let err = cy["normalized_error"].as_f64().unwrap();
    assert!(err > 0.0 && err <= cy["bound"].as_f64().unwrap());
    // log2 C(16, 8) = log2 12870
    assert!((entry(&cy["vector"], "1,2") - 12870f64.log2()).abs() < 1e-9);

    for args in [
        vec!["types", "kron", "2,1", "2,1", "2,1"],
        vec!["types", "restrict", "2,1", "2"],
        vec!["types", "aep", "--p", "0.5,0.5", "--n", "64", "--eps", "0.25"],
        vec!["types", "dims", "3,1", "--d", "3"],
        vec!["types", "schur-weyl", "2", "4"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        validate(TYPES_SCHEMA, &r.json());
    }
    assert_eq!(run(&["types", "kron", "2,1", "2,1", "2,1"]).json()["kronecker"], json!(1));
    assert!(run(&["types", "aep", "--p", "0.5,0.5", "--n", "64", "--eps", "0.25"]).json()["mass"].as_f64().unwrap() >= 0.95);
}

#[test]
fn rays_verdicts() {
    let dir = TempDir::new().unwrap();
    let ghz = write(&dir, "ghz.json", &ghz3());
    let v = run(&["rays", s(&ghz)]).json();
    validate(DIFF_SCHEMA, &v);
    assert_eq!(v["verdict"]["name"], json!("all-flat"));
    assert_eq!(v["verdict"]["code"], json!(3));

    let generic = write(&dir, "generic.json", &generic3());
    let v = run(&["rays", s(&generic)]).json();
    validate(DIFF_SCHEMA, &v);
    assert_eq!(v["verdict"]["name"], json!("not-extremal-candidate"));
    assert_eq!(v["verdict"]["code"], Value::Null);

    let a = [0.8, 0.0, 0.0, 0.6];
    let prod: Vec<f64> = (0..16).map(|i| a[i / 4] * a[i % 4]).collect();
    let p = write(&dir, "prod.json", &pure(&[2, 2, 2, 2], &prod, &[0.0; 16]));
    let v = run(&["rays", s(&p)]).json();
    validate(DIFF_SCHEMA, &v);
    assert_eq!(v["verdict"]["name"], json!("splits"));
    assert_eq!(v["verdict"]["code"], json!(1));

    let corr = write(&dir, "corr.json", r#"{"dims":[2,2],"probs":["1/2",0,0,"1/2"]}"#);
    let v = run(&["rays", s(&corr)]).json();
    validate(DIFF_SCHEMA, &v);
    assert_eq!(v["kind"], json!("classical"));
}

#[test]
fn rank_of_three_lines_in_a_plane() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "fam.txt", "2 2 3\n1\n1 0\n1\n0 1\n1\n1 1\n");
    let v = run(&["rank", s(&f)]).json();
    validate(RANK_SCHEMA, &v);
    assert_eq!(v["rank_vector"]["1,2,3"], json!(2));
    assert_eq!(v["rank_vector"]["1,2"], json!(2));
    assert_eq!(v["rank_vector"]["3"], json!(1));
    assert_eq!(v["witness_agrees"], json!(true));
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = TempDir::new().unwrap();
    let generic = write(&dir, "generic.json", &generic3());
    let cases: Vec<Vec<&str>> = vec![
        vec!["rays", s(&generic)],
        vec!["stab", "--enumerate", "3", "2", "--budget", "500", "--seed", "7"],
        vec!["stab", "--enumerate", "2", "3", "--emit-csv"],
    ];
    for args in &cases {
        let base = run(args);
        assert_eq!(base.code, 0, "{args:?}: {}", base.stderr);
        for threads in ["1", "3", "8"] {
            let r = run_env(args, &[("ENTROCONE_THREADS", threads)]);
            assert_eq!(r.stdout, base.stdout, "{args:?} with {threads} threads");
        }
    }
    assert_eq!(run_env(&["catalog", "2"], &[("ENTROCONE_THREADS", "zero")]).code, 2);
}

#[test]
fn timing_is_opt_in() {
    let plain = run(&["catalog", "2"]).json();
    assert!(plain.get("timing_ms").is_none());
    let timed = run(&["--timing", "catalog", "2"]).json();
    assert!(timed["timing_ms"].as_f64().unwrap() >= 0.0);
    validate(CONE_SCHEMA, &timed);
}
