use std::collections::BTreeSet;
use std::process::Command;

use quiverlc_core::json::{
    ClassificationJson, DistanceJson, PathCountJson, SectionJson, SectionReportJson, SphereJson,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tempfile::TempDir;

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn quiverlc(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_quiverlc")).args(args).output().unwrap();
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap(),
    }
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a2.quiver"), "vertex x\nvertex y\narrow x y\n").unwrap();
    std::fs::write(dir.path().join("good.sel"), "0:x 0:y\n").unwrap();
    std::fs::write(dir.path().join("bad.sel"), "0:x 1:y\n").unwrap();
    dir
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

/// Parses stdout into the schema type and checks that writing it back out
/// loses nothing.
fn round_trip<T: DeserializeOwned + Serialize>(stdout: &str) -> T {
    let value: serde_json::Value = serde_json::from_str(stdout).unwrap();
    let typed: T = serde_json::from_value(value.clone()).unwrap();
    assert_eq!(serde_json::to_value(&typed).unwrap(), value);
    typed
}

#[test]
fn distance_between_base_vertices() {
    let dir = workspace();
    let run = quiverlc(&["dist", "--file", &path(&dir, "a2.quiver"), "x", "y"]);
    assert_eq!((run.stdout.as_str(), run.code), ("0\n", 0));
    let run = quiverlc(&["dist", "--file", &path(&dir, "a2.quiver"), "y", "x"]);
    assert_eq!(run.stdout, "1\n");
}

#[test]
fn zq_distance_json_and_oracle_agree() {
    let dir = workspace();
    let file = path(&dir, "a2.quiver");
    let json: DistanceJson = round_trip(&quiverlc(&["dist", "--file", &file, "0:x", "1:y", "--json"]).stdout);
    let oracle: DistanceJson =
        round_trip(&quiverlc(&["dist", "--file", &file, "0:x", "1:y", "--json", "--oracle"]).stdout);
    assert_eq!(json.distance(), oracle.distance());
    assert_eq!(json.distance(), Some(quiverlc_core::ExtDistance::Finite(-1)));
}

#[test]
fn roundtrip_and_spheres() {
    let dir = workspace();
    let rt: DistanceJson =
        round_trip(&quiverlc(&["rtdist", "--file", &path(&dir, "a2.quiver"), "x", "y", "--json"]).stdout);
    assert_eq!(rt.distance(), Some(quiverlc_core::ExtDistance::Finite(1)));
    let s: SphereJson = round_trip(&quiverlc(&["sphere", "--family", "a-inf-inf-linear", "0", "3", "--json"]).stdout);
    assert_eq!(s.members, vec!["-3".to_string(), "3".to_string()]);
    assert!(s.complete);
    let s: SphereJson = round_trip(&quiverlc(&["sphere", "--family", "figure1-right", "0", "1", "--json"]).stdout);
    assert!(!s.complete);
    assert_eq!(s.size, s.members.len());
}

#[test]
fn section_output_verifies() {
    let dir = workspace();
    let file = path(&dir, "a2.quiver");
    let run = quiverlc(&["section", "--file", &file, "--center", "0:x", "--json"]);
    assert_eq!(run.code, 0);
    let section: SectionJson = round_trip(&run.stdout);
    assert_eq!(section.selection.len(), 2);
    let saved = dir.path().join("built.json");
    std::fs::write(&saved, &run.stdout).unwrap();
    let run = quiverlc(&["verify-section", "--file", &file, saved.to_str().unwrap(), "--json"]);
    let report: SectionReportJson = round_trip(&run.stdout);
    assert!(report.valid);
    assert_eq!(run.code, 0);
}

#[test]
fn verify_section_exit_codes() {
    let dir = workspace();
    let file = path(&dir, "a2.quiver");
    let good = quiverlc(&["verify-section", "--file", &file, &path(&dir, "good.sel")]);
    assert_eq!(good.code, 0, "{}", good.stdout);
    let bad = quiverlc(&["verify-section", "--file", &file, &path(&dir, "bad.sel"), "--json"]);
    assert_eq!(bad.code, 1);
    let report: SectionReportJson = round_trip(&bad.stdout);
    assert!(!report.valid);
    assert!(!report.violations.is_empty());
}

#[test]
fn classify_verdicts() {
    let dir = workspace();
    let ok = quiverlc(&["classify", "--file", &path(&dir, "a2.quiver"), "--json"]);
    assert_eq!(ok.code, 0);
    let report: ClassificationJson = round_trip(&ok.stdout);
    assert!(report.exact);
    let cyclic = quiverlc(&["classify", "--family", "a1-tilde-cyclic", "--json"]);
    assert_eq!(cyclic.code, 1);
    let report: ClassificationJson = round_trip(&cyclic.stdout);
    assert!(report.cycle.is_some());
    let fig = quiverlc(&["classify", "--family", "figure1-right"]);
    assert_eq!(fig.code, 1);
    assert_eq!(quiverlc(&["classify", "--family", "a-inf-inf-linear"]).code, 0);
}

#[test]
fn path_counts() {
    let dir = workspace();
    let file = path(&dir, "a2.quiver");
    let c: PathCountJson = round_trip(&quiverlc(&["count-paths", "--file", &file, "0:x", "1:x", "--json"]).stdout);
    assert_eq!(c.count, "1");
    let c: PathCountJson =
        round_trip(&quiverlc(&["count-paths", "--file", &file, "0:x", "1:x", "--sectional", "--json"]).stdout);
    assert_eq!(c.count, "0");
    let c: PathCountJson =
        round_trip(&quiverlc(&["count-paths", "--family", "a1-tilde-cyclic", "0:a", "--shift", "1", "--json"]).stdout);
    assert_eq!(c.count, "inf");
    assert!(c.witness_cycle.is_some_and(|w| w.first() == w.last()));
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = workspace();
    assert_eq!(quiverlc(&["bogus"]).code, 2);
    assert_eq!(quiverlc(&["dist", "--file", &path(&dir, "missing.quiver"), "x", "y"]).code, 2);
    let unknown = quiverlc(&["dist", "--file", &path(&dir, "a2.quiver"), "x", "z"]);
    assert_eq!(unknown.code, 2);
    assert!(unknown.stderr.starts_with("error:"));
    assert_eq!(quiverlc(&["sphere", "--family", "no-such-family", "0", "1"]).code, 2);
    let both = quiverlc(&["dist", "--file", &path(&dir, "a2.quiver"), "--family", "a-inf-inf-linear", "x", "y"]);
    assert_eq!(both.code, 2);
}

/// Statements of a `digraph` as accepted by a small subset of the DOT
/// grammar: node statements, edge statements, attribute statements and
/// `key=value` lines, each ending in `;`.
#[derive(Debug, Default)]
struct Dot {
    nodes: BTreeSet<String>,
    edges: Vec<(String, String)>,
}

fn parse_id(s: &str) -> Result<(String, &str), String> {
    let s = s.trim_start();
    if let Some(rest) = s.strip_prefix('"') {
        let mut out = String::new();
        let mut chars = rest.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => {
                    let (_, e) = chars.next().ok_or("dangling escape")?;
                    out.push('\\');
                    out.push(e);
                }
                '"' => return Ok((out, &rest[i + 1..])),
                '\n' => return Err("newline inside quoted id".into()),
                c => out.push(c),
            }
        }
        Err("unterminated quoted id".into())
    } else {
        let end = s
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.'))
            .unwrap_or(s.len());
        if end == 0 {
            return Err(format!("expected id at {s:?}"));
        }
        Ok((s[..end].to_string(), &s[end..]))
    }
}

fn parse_attrs(s: &str) -> Result<&str, String> {
    let s = s.trim_start();
    let Some(mut rest) = s.strip_prefix('[') else { return Ok(s) };
    loop {
        rest = rest.trim_start();
        if let Some(after) = rest.strip_prefix(']') {
            return Ok(after);
        }
        let (_, r) = parse_id(rest)?;
        let r = r.trim_start().strip_prefix('=').ok_or("expected '=' in attribute")?;
        let (_, r) = parse_id(r)?;
        rest = r.trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest);
    }
}

fn parse_dot(text: &str) -> Result<Dot, String> {
    let body = text.trim_end();
    let (header, body) = body.split_once('{').ok_or("missing '{'")?;
    let mut words = header.split_whitespace();
    if words.next() != Some("digraph") {
        return Err("not a digraph".into());
    }
    parse_id(words.next().ok_or("missing graph name")?)?;
    let body = body.strip_suffix('}').ok_or("missing closing '}'")?;
    let mut dot = Dot::default();
    let mut rest = body.trim_start();
    while !rest.is_empty() {
        let (first, r) = parse_id(rest)?;
        let r = r.trim_start();
        let r = if let Some(r) = r.strip_prefix("->") {
            let (second, r) = parse_id(r)?;
            dot.edges.push((first, second));
            parse_attrs(r)?
        } else if let Some(r) = r.strip_prefix('=') {
            parse_id(r)?.1
        } else {
            let r = parse_attrs(r)?;
            if !matches!(first.as_str(), "node" | "edge" | "graph") {
                dot.nodes.insert(first);
            }
            r
        };
        rest = r.trim_start().strip_prefix(';').ok_or_else(|| format!("missing ';' before {r:?}"))?.trim_start();
    }
    for (a, b) in &dot.edges {
        if !dot.nodes.contains(a) || !dot.nodes.contains(b) {
            return Err(format!("edge {a} -> {b} uses an undeclared node"));
        }
    }
    Ok(dot)
}

#[test]
fn dot_validator_rejects_garbage() {
    assert!(parse_dot("digraph g {\n  \"a\";\n  \"a\" -> \"b\";\n}").is_err());
    assert!(parse_dot("digraph g {\n  \"a\"\n}").is_err());
    assert!(parse_dot("graph g {\n}").is_err());
    assert!(parse_dot("digraph g {\n  \"a\" [x=\"1\"];\n}").is_ok());
}

#[test]
fn dot_output_is_well_formed() {
    let dir = workspace();
    let file = path(&dir, "a2.quiver");
    let slab = |mode: &str, center: &str| {
        let run = quiverlc(&["emit-dot", "--file", &file, "--window", "1", "--mode", mode, "--center", center]);
        assert_eq!(run.code, 0, "{}", run.stderr);
        parse_dot(&run.stdout).unwrap_or_else(|e| panic!("{mode}: {e}\n{}", run.stdout))
    };
    for mode in ["plain", "lightcones", "roundtrip", "section"] {
        let dot = slab(mode, "0:x");
        // slices -1..=1 of a two-vertex quiver: one arrow per slice, two between
        assert_eq!(dot.nodes.len(), 6);
        assert_eq!(dot.edges.len(), 5);
    }
    let q = quiverlc(&["emit-dot", "--file", &file, "--quiver"]);
    let dot = parse_dot(&q.stdout).unwrap();
    assert_eq!(dot.edges, vec![("x".to_string(), "y".to_string())]);
    let lin = quiverlc(&["emit-dot", "--family", "a-inf-inf-linear", "--window", "2", "--mode", "section", "--center", "0:0"]);
    parse_dot(&lin.stdout).unwrap();
}

#[test]
fn selection_file_formats_agree() {
    let dir = workspace();
    let file = path(&dir, "a2.quiver");
    let json = r#"{"center":{"slice":0,"base":"x"},"selection":[{"base":"x","slice":0},{"base":"y","slice":0}]}"#;
    std::fs::write(dir.path().join("sel.json"), json).unwrap();
    let a = quiverlc(&["verify-section", "--file", &file, &path(&dir, "good.sel"), "--json"]);
    let b = quiverlc(&["verify-section", "--file", &file, &path(&dir, "sel.json"), "--json"]);
    assert_eq!(a.stdout, b.stdout);
}
