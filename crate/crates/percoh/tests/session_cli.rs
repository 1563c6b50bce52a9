//! The session format and the command-line binary: canonical
//! serialization, round-trips, parser totality under mutation, output
//! determinism, and the exit-code contract.

mod common;

use common::all_worlds;
use percoh::session::{parse_input, serialize};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::{Command, Output};

const GOLDEN_INPUT: &str = r#"
# Flagship: the quadric cone with its middle perversity.
field.char = 32003
ambient.vars = ["x", "y", "z"]
quotient = ["x*y - z^2"]
points.eta = []
points.o = ["x", "y", "z"]
perversity.mid = {eta: -1, o: 0}
complex.IC.degree.-1.gens = 1
complex.SKY.degree.0.gens = 1
complex.SKY.degree.0.rels = [["x"], ["y"], ["z"]]
"#;

/// The canonical form of the golden document, byte for byte. Point
/// generators are normalized, defaults are made explicit, comments drop.
const GOLDEN_CANONICAL: &str = "field.char = 32003\n\
ambient.vars = [\"x\", \"y\", \"z\"]\n\
ambient.order = grevlex\n\
quotient = [\"x*y - z^2\"]\n\
points.eta = []\n\
points.o = [\"z\", \"y\", \"x\"]\n\
perversity.mid = {eta: -1, o: 0}\n\
complex.IC.degree.-1.gens = 1\n\
complex.SKY.degree.0.gens = 1\n\
complex.SKY.degree.0.rels = [[\"x\"], [\"y\"], [\"z\"]]\n";

#[test]
fn golden_session_serializes_canonically() {
    let doc = parse_input(GOLDEN_INPUT).unwrap();
    assert_eq!(serialize(&doc), GOLDEN_CANONICAL);
}

/// Serialization is a fixed point: parsing canonical text and serializing
/// again changes nothing, for every world in the battery.
#[test]
fn serialization_round_trips() {
    for w in all_worlds() {
        let s1 = serialize(&w.doc);
        let doc2 = parse_input(&s1)
            .unwrap_or_else(|e| panic!("{}: canonical text does not parse: {e}", w.name));
        let s2 = serialize(&doc2);
        assert_eq!(s1, s2, "{}: serialization is not idempotent", w.name);
    }
}

/// Ten thousand mutated documents: every outcome is a parse or a
/// diagnostic, never a crash. Mutations splice arbitrary bytes into the
/// battery's session texts.
#[test]
fn parser_survives_mutation() {
    let bases: Vec<String> = all_worlds()
        .iter()
        .map(|w| serialize(&w.doc))
        .chain(std::iter::once(GOLDEN_INPUT.to_string()))
        .collect();
    let alphabet: &[u8] = b"[]{}=.,\"#-0123456789abcxyzeta \n\t*^_";
    let mut rng = ChaCha8Rng::seed_from_u64(0xf0220);
    let mut parsed_ok = 0usize;
    for i in 0..10_000 {
        let mut bytes = bases[i % bases.len()].clone().into_bytes();
        for _ in 0..rng.gen_range(1..=8) {
            if bytes.is_empty() {
                break;
            }
            let at = rng.gen_range(0..bytes.len());
            match rng.gen_range(0..3) {
                0 => bytes[at] = alphabet[rng.gen_range(0..alphabet.len())],
                1 => bytes.insert(at, alphabet[rng.gen_range(0..alphabet.len())]),
                _ => {
                    bytes.remove(at);
                }
            }
        }
        let text = String::from_utf8_lossy(&bytes);
        if parse_input(&text).is_ok() {
            parsed_ok += 1;
        }
    }
    // Light mutations leave many documents intact; both outcomes occur.
    assert!(parsed_ok > 0 && parsed_ok < 10_000, "mutation corpus is degenerate ({parsed_ok})");
}

// ---- binary-level checks ----------------------------------------------

fn write_session(label: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("percoh_{}_{label}.pc", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

fn run_binary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_percoh"))
        .args(args)
        .output()
        .expect("binary must spawn")
}

const RUN_SESSION: &str = r#"
field.char = 32003
ambient.vars = ["x", "y", "z"]
quotient = ["x*y - z^2"]
points.eta = []
points.o = ["x", "y", "z"]
perversity.mid = {eta: -1, o: 0}
complex.IC.degree.-1.gens = 1
complex.SKY.degree.0.gens = 1
complex.SKY.degree.0.rels = [["x"], ["y"], ["z"]]
complex.OO.degree.0.gens = 1
validate
member IC mid leq --assert true
member SKY mid geq --assert true
truncate OO mid
pcoh IC mid 0
dual SKY
ortho SKY OO mid
ic IC mid --boundary o
minimal IC mid --boundary o
gamma OO --ideal o --cutoff 3
"#;

/// A full command battery exits zero, its structured output is identical
/// across runs, parses as data, and carries no timing noise.
#[test]
fn structured_output_is_deterministic() {
    let path = write_session("determinism", RUN_SESSION);
    let file = path.to_str().unwrap();
    let first = run_binary(&["run", file, "--format", "json"]);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&first.stderr));
    let second = run_binary(&["run", file, "--format", "json"]);
    assert_eq!(first.stdout, second.stdout, "structured output drifted between runs");
    let text = String::from_utf8(first.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("output must be data");
    assert_eq!(parsed.as_array().map(|a| a.len()), Some(10), "one report per command");
    assert!(!text.contains("millis"), "timing leaked into the stable format");
    std::fs::remove_file(path).ok();
}

/// The human format reports every command with its timing and check lines.
#[test]
fn human_output_reports_each_command() {
    let path = write_session("human", RUN_SESSION);
    let out = run_binary(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for header in ["== validate", "== member", "== truncate", "== pcoh", "== dual", "== ortho", "== ic", "== minimal", "== gamma"] {
        assert!(text.contains(header), "missing report header {header}");
    }
    assert!(text.contains(" ms]"), "human format should show timing");
    assert!(text.contains("[checked]"), "certificates should be listed");
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_codes_match_the_contract() {
    // 0: clean validate of the golden document.
    let golden = write_session("golden", GOLDEN_INPUT);
    assert_eq!(run_binary(&["validate", golden.to_str().unwrap()]).status.code(), Some(0));

    // 1: a property asserted the wrong way round.
    let lie = format!("{GOLDEN_INPUT}\nmember IC mid leq --assert false\n");
    let lie_path = write_session("assert", &lie);
    let out = run_binary(&["run", lie_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("asserted"));

    // 2: malformed input (nonprime characteristic).
    let bad = GOLDEN_INPUT.replace("32003", "32004");
    let bad_path = write_session("nonprime", &bad);
    let out = run_binary(&["validate", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));

    // 2: a file that is not there.
    let out = run_binary(&["run", "/definitely/not/here.pc"]);
    assert_eq!(out.status.code(), Some(2));

    // 2: selecting a command index beyond the document.
    let golden_run = format!("{GOLDEN_INPUT}\nvalidate\n");
    let sel_path = write_session("only", &golden_run);
    let out = run_binary(&["run", sel_path.to_str().unwrap(), "--only", "99"]);
    assert_eq!(out.status.code(), Some(2));

    // 3: a mathematically unsupported ring, reached only at run time.
    let thick = "\
field.char = 32003\n\
ambient.vars = [\"x\", \"y\"]\n\
quotient = [\"x^2\", \"x*y\"]\n\
points.g = []\n\
perversity.zero = {g: 0}\n\
complex.C.degree.0.gens = 1\n\
dual C\n";
    let thick_path = write_session("noncm", thick);
    let out = run_binary(&["run", thick_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Cohen-Macaulay"));

    for p in [golden, lie_path, bad_path, sel_path, thick_path] {
        std::fs::remove_file(p).ok();
    }
}

/// A failing command stops the run: reports for earlier commands are
/// still produced, later ones are not.
#[test]
fn run_stops_at_first_failure() {
    let text = format!(
        "{GOLDEN_INPUT}\nvalidate\nmember IC mid leq --assert false\nvalidate\n"
    );
    let path = write_session("stops", &text);
    let out = run_binary(&["run", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let reports: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("partial output must still be data");
    assert_eq!(
        reports.as_array().map(|a| a.len()),
        Some(2),
        "the run must include the failing report and nothing after it"
    );
    std::fs::remove_file(path).ok();
}
