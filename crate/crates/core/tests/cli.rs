mod common;

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use common::{random_context, rng, tol, BAD_CONTEXT_JSON, PAULI_JSON};
use kslat::cli::{self, EXIT_CAP, EXIT_INVALID, EXIT_OK, EXIT_UNSAT};
use kslat::document::{emit, ingest, ingest_str, parse_state, ToleranceOverrides};
use kslat::linalg::max_abs;
use kslat::{pauli_contexts, ContextCollection, Error};
use proptest::prelude::*;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn kslat(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kslat")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn same_collection(a: &ContextCollection, b: &ContextCollection) -> bool {
    a.ambient_dim() == b.ambient_dim()
        && a.contexts().len() == b.contexts().len()
        && a.contexts().iter().zip(b.contexts()).all(|(x, y)| {
            x.id() == y.id()
                && x.members().len() == y.members().len()
                && x.members().iter().zip(y.members()).all(|(p, q)| {
                    p.label() == q.label() && max_abs(&(p.matrix() - q.matrix())) <= tol().eps_entry
                })
        })
}

fn temp_json(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn emit_then_ingest_round_trips(seed in any::<u64>(), n in 2usize..=4, k in 1usize..=3) {
        let t = tol();
        let mut g = rng(seed);
        let contexts = (0..k).map(|i| random_context(&mut g, &format!("c{i}"), &vec![1; n])).collect();
        let col = ContextCollection::new(contexts, &t).unwrap();
        let (back, _) = ingest_str(&emit(&col), &ToleranceOverrides::default()).unwrap();
        prop_assert!(same_collection(&col, &back));
        prop_assert_eq!(back.registry().len(), col.registry().len());
    }
}

#[test]
fn pauli_round_trips_through_text_and_file() {
    let col = pauli_contexts();
    let text = emit(&col);
    let (back, _) = ingest_str(&text, &ToleranceOverrides::default()).unwrap();
    assert!(same_collection(&col, &back));
    let file = temp_json(&text);
    let (from_file, _) = ingest(file.path(), &ToleranceOverrides::default()).unwrap();
    assert!(same_collection(&col, &from_file));
    let (shipped, _) = ingest_str(PAULI_JSON, &ToleranceOverrides::default()).unwrap();
    assert!(same_collection(&col, &shipped));
}

#[test]
fn reports_share_one_top_level_schema() {
    let pauli = data("pauli.json");
    let p = pauli.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", p],
        vec!["lattice", p],
        vec!["lattice", p, "--context", "y"],
        vec!["intersect", p],
        vec!["irreducible", p],
        vec!["valuate", p, "--state", "1,0;0,0"],
        vec!["ks-search", p],
        vec!["demo", "pauli"],
        vec!["validate", "/nonexistent.json"],
    ];
    let expected = ["command", "error", "exit_code", "residuals", "timing_ms", "verdicts"];
    for args in runs {
        let mut full = vec!["kslat", "--format", "json"];
        full.extend(&args);
        let outcome = cli::run(full);
        let v: Value = serde_json::from_str(&outcome.output).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, expected, "{args:?}");
        assert_eq!(v["exit_code"].as_u64().unwrap() as u8, outcome.exit_code);
    }
}

#[test]
fn binary_exit_codes() {
    let p = data("pauli.json");
    assert_eq!(kslat(&["validate", p.to_str().unwrap()]).0, EXIT_OK as i32);
    assert_eq!(kslat(&["ks-search", p.to_str().unwrap()]).0, EXIT_OK as i32);
    assert_eq!(kslat(&["demo", "pauli"]).0, EXIT_OK as i32);

    let (code, out) = kslat(&["validate", data("bad_context.json").to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID as i32);
    assert!(out.contains("error"), "{out}");

    let (code, out) = kslat(&["ks-search", data("cabello18.json").to_str().unwrap()]);
    assert_eq!(code, EXIT_UNSAT as i32);
    assert!(out.contains("UNSAT"));

    assert_eq!(kslat(&["validate", "/no/such/file.json"]).0, EXIT_INVALID as i32);
    assert_eq!(kslat(&["no-such-command"]).0, EXIT_INVALID as i32);
}

#[test]
fn oversized_context_exits_with_the_cap_code() {
    let n = 21;
    let rays: serde_json::Map<String, Value> = (0..n)
        .map(|k| {
            let v: Vec<[f64; 2]> = (0..n).map(|j| [if j == k { 1.0 } else { 0.0 }, 0.0]).collect();
            (format!("e{k}"), serde_json::json!(v))
        })
        .collect();
    let names: Vec<String> = rays.keys().cloned().collect();
    let doc = serde_json::json!({ "dim": n, "rays": rays, "groups": { "all": names } });
    let file = temp_json(&doc.to_string());
    let path = file.path().to_str().unwrap();
    assert_eq!(kslat(&["validate", path]).0, EXIT_OK as i32);
    assert_eq!(kslat(&["lattice", path]).0, EXIT_CAP as i32);
}

#[test]
fn malformed_documents_are_rejected() {
    for text in [
        "not json",
        r#"{"dim": 2}"#,
        r#"{"dim": 2, "contexts": {}, "rays": {}}"#,
        r#"{"dim": 2, "contexts": {"z": []}}"#,
        r#"{"dim": 2, "contexts": {"z": [[[[1,0]]]]}}"#,
        r#"{"dim": 2, "rays": {"a": [[1,0],[0,0]]}, "groups": {"g": ["b"]}}"#,
        r#"{"dim": 2, "eps_rank": -1, "rays": {"a": [[1,0],[0,0]]}, "groups": {"g": ["a"]}}"#,
    ] {
        assert!(ingest_str(text, &ToleranceOverrides::default()).is_err(), "{text}");
    }
    let err = ingest_str(BAD_CONTEXT_JSON, &ToleranceOverrides::default()).unwrap_err();
    assert!(matches!(err, Error::PairwiseProductNonzero { .. }));
}

#[test]
fn tolerance_flags_are_validated() {
    let p = data("pauli.json");
    let p = p.to_str().unwrap();
    assert_eq!(cli::run(["kslat", "validate", p, "--eps-rank", "1e-3"]).exit_code, EXIT_INVALID);
    assert_eq!(cli::run(["kslat", "validate", p, "--eps-subspace", "0"]).exit_code, EXIT_INVALID);
    assert_eq!(cli::run(["kslat", "validate", p, "--eps-subspace", "1e-6"]).exit_code, EXIT_OK);
}

#[test]
fn valuate_reports_undefined_values() {
    let p = data("pauli.json");
    let outcome = cli::run(["kslat", "--format", "json", "valuate", p.to_str().unwrap(), "--state", "1,0;0,0"]);
    assert_eq!(outcome.exit_code, EXIT_OK);
    let v: Value = serde_json::from_str(&outcome.output).unwrap();
    let entries = v["verdicts"]["valuation"]["entries"].as_array().unwrap();
    let values: Vec<&str> = entries.iter().map(|e| e["value"].as_str().unwrap()).collect();
    assert_eq!(values, ["1", "0", "undefined", "undefined", "undefined", "undefined"]);

    let zero = cli::run(["kslat", "valuate", p.to_str().unwrap(), "--state", "0,0;0,0"]);
    assert_eq!(zero.exit_code, EXIT_INVALID);
    assert!(parse_state("1,0;-0.5,2").is_ok());
    assert!(parse_state("1;2").is_err());
}
