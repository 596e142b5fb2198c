use std::path::PathBuf;
use std::process::Command;

use vertex_cli::context::{load_algebra, HEISENBERG1_TEXT, SL2_TEXT};
use vertex_cli::{parse_algebra, parse_document, AlgebraDocument, DslError};
use vertex_core::algebras::{heisenberg, sl2_affine, sl2_eigenbasis};

fn vertex(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_vertex")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vertex-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn semantic_error(text: &str) -> (usize, usize, String) {
    match parse_algebra(text) {
        Err(DslError::Semantic { pos, message }) => (pos.line, pos.column, message),
        other => panic!("expected a semantic error, got {other:?}"),
    }
}

#[test]
fn builtin_sl2_text_is_the_affine_algebra() {
    assert_eq!(parse_algebra(SL2_TEXT).unwrap(), sl2_affine());
    assert_eq!(parse_algebra(HEISENBERG1_TEXT).unwrap(), heisenberg(1));
}

#[test]
fn documents_round_trip() {
    for spec in [sl2_affine(), heisenberg(3), sl2_eigenbasis().spec, load_algebra("sl3").unwrap()] {
        let doc = AlgebraDocument::from_spec(&spec);
        let text = doc.render();
        assert_eq!(parse_document(&text).unwrap(), doc, "{text}");
        assert_eq!(parse_algebra(&text).unwrap(), spec, "{text}");
    }
}

#[test]
fn dangling_caret_is_located() {
    let err = parse_algebra("algebra t over k\ngen a weight 1\nope a a 1= k^\n").unwrap_err();
    let DslError::Syntax(e) = err else { panic!("expected a syntax error") };
    assert_eq!((e.pos.line, e.pos.column), (3, 13));
    assert!(e.message.contains("dangling `^`"));
}

#[test]
fn skew_symmetry_violation_is_located() {
    let (line, column, message) =
        semantic_error("algebra t\ngen a weight 1\ngen b weight 1\nope a b 1= 1\nope b a 1= 2\n");
    assert_eq!((line, column), (5, 1));
    assert!(message.contains("skew-symmetry"), "{message}");
}

#[test]
fn unknown_generator_and_weight_mismatch() {
    let (line, column, message) = semantic_error("algebra t\ngen a weight 1\nope a c 1= 1\n");
    assert_eq!((line, column), (3, 7));
    assert!(message.contains("unknown generator `c`"));
    let (line, _, message) = semantic_error("algebra t\ngen a weight 1\ngen b weight 2\nope a b 1= 1\n");
    assert_eq!(line, 4);
    assert!(message.contains("weight"), "{message}");
}

#[test]
fn level_only_in_symbolic_algebras() {
    assert!(parse_algebra("algebra t\ngen a weight 1\nope a a 1= k\n").is_err());
    assert!(parse_algebra("algebra t over k\ngen a weight 1\nope a a 1= (k+1)/2\n").is_ok());
}

#[test]
fn dn_suite_prints_the_relation() {
    let (code, out, _) = vertex(&["verify", "--suite", "heisenberg-n1-dn"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains(":w00 w11: - :w01 w01: = -5/4*w04 + 7/4*d^2 w02 - 7/24*d^4 w00"), "{out}");
    assert!(out.contains("13/13 checks passed"));
}

#[test]
fn single_boson_span_is_full() {
    let (code, out, _) = vertex(&["span", "--gens", "builtin:h1", "--cutoff", "6"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.ends_with("full")).count(), 6, "{out}");
}

#[test]
fn products_render_canonically() {
    let (code, out, _) = vertex(&["ope", "--algebra", "sl2", "x", "y"]);
    assert_eq!((code, out.as_str()), (0, "0: :h:\n1: k\n"));
    let (code, out, _) = vertex(&["nprod", "-n", "-1", "--algebra", "h1", "a", "d^1 a"]);
    assert_eq!((code, out.trim()), (0, ":d^1 a a:"));
    let (_, out, _) = vertex(&["wick", "--algebra", "h2", "--let", "w=:a1 a2:", "w", "a1"]);
    // Reordering `:(:a1 a2:) a1:` picks up the contraction a1∘1 a1 = 1.
    assert_eq!(out.trim(), "1/2*:d^2 a2: + :a1 a1 a2:");
}

#[test]
fn decoupling_record_is_written() {
    let path = temp_file("w04.json", "");
    let (code, out, _) = vertex(&[
        "decouple",
        "--gens",
        "builtin:h1",
        "--target",
        ":a d^4 a:",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("weight 6\n"));
    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(record["success"], true);
    assert_eq!(record["residual"], "0");
    assert_eq!(record["denominators"], serde_json::json!(["30", "5"]));
}

#[test]
fn failed_decoupling_exits_one() {
    // Without w02 the weight-4 quadratics are out of reach.
    let (code, out, _) = vertex(&["decouple", "--algebra", "h1", "--gens", "w00=:a a:", "--target", ":a d^2 a:"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("residual"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(vertex(&["verify", "--suite", "nope"]).0, 2);
    assert_eq!(vertex(&["ope", "--algebra", "sl2", "x", "q"]).0, 2);
    assert_eq!(vertex(&["ope", "--algebra", "sl2", "x", "y^"]).0, 2);
    assert_eq!(vertex(&["frobnicate"]).0, 2);
    assert_eq!(vertex(&["--help"]).0, 0);
    let path = temp_file("bad.alg", "algebra t\ngen a weight 1\nope a a 1= 1 +\n");
    let (code, _, err) = vertex(&["show", "--algebra", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3, column 14"), "{err}");
}

#[test]
fn json_output() {
    let (code, out, _) = vertex(&["--format", "json", "ope", "--algebra", "h1", "a", "a"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v, serde_json::json!([{"n": 1, "field": "1"}]));
    let (code, out, _) = vertex(&["--format", "json", "verify", "--suite", "large-level"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "heisenberg-n2", "--cutoff", "4"];
    let first = vertex(&args);
    assert_eq!(first.0, 0, "{}", first.1);
    assert_eq!(first, vertex(&args));
}

#[test]
fn algebra_files_load() {
    let path = temp_file("vir.alg", "# a weight-2 field with a central term\nalgebra vir over k\ngen L weight 2\nope L L 0= :d^1 L:\nope L L 1= 2*:L:\nope L L 3= k/2\n");
    let (code, out, err) = vertex(&["ope", "--algebra", path.to_str().unwrap(), "L", "L"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "0: :d^1 L:\n1: 2*:L:\n3: k/2\n");
}
