//! Session documents: a line-based text format declaring one ring, its
//! declared points and perversities, named complexes, and a command list.
//!
//! Grammar, one statement per line (`#` starts a comment):
//!
//! ```text
//! field.char = 32003
//! ambient.vars = ["x", "y", "z"]
//! ambient.order = grevlex
//! quotient = ["x*y - z^2"]
//! points.eta = []
//! points.o = ["x", "y", "z"]
//! perversity.mid = {eta: -1, o: 0}
//! complex.IC.degree.-1.gens = 1
//! complex.IC.degree.-1.rels = []
//! complex.F.diff.0 = [["x", "y"], ["z", "x"]]
//! member IC mid leq --assert true
//! ```
//!
//! Assignments may appear in any order; commands run in file order. A
//! differential matrix at degree `k` is written with one row per generator
//! of degree `k+1` and one column per generator of degree `k`; a relation
//! matrix has one row per relation, with one entry per generator.

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::member::Side;
use crate::module::{columns_strings, PresentedModule};
use crate::monomial::MonoOrder;
use crate::poly::{Mat, Vect};
use crate::ring::Ring;
use crate::space::{build_space, DeclaredSpace, Perversity};
use std::collections::BTreeMap;
use std::sync::Arc;

/// One parsed command, with every referenced name already resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Validate,
    Member { complex: String, perversity: String, side: Side, assert: Option<bool> },
    Truncate { complex: String, perversity: String },
    Pcoh { complex: String, perversity: String, k: i64 },
    Dual { complex: String },
    Ic { complex: String, perversity: String, boundary: Vec<String> },
    Minimal { complex: String, perversity: String, boundary: Vec<String> },
    Ortho { f: String, g: String, perversity: String },
    Gamma { complex: String, ideal: String, cutoff: usize },
}

/// A fully resolved session: one ring, optional declared space, named
/// perversities and complexes, and the commands to run against them.
pub struct SessionDocument {
    pub ring: Arc<Ring>,
    pub space: Option<DeclaredSpace>,
    pub point_names: Vec<String>,
    pub perversities: BTreeMap<String, Perversity>,
    pub complexes: BTreeMap<String, Arc<Complex>>,
    pub commands: Vec<(usize, Command)>,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

/// A parsed right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Value {
    Int(i64),
    Word(String),
    List(Vec<String>),
    Matrix(Vec<Vec<String>>),
    Map(Vec<(String, i64)>),
}

struct Scanner<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    base_col: usize,
    _text: &'a str,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str, line: usize, base_col: usize) -> Scanner<'a> {
        Scanner { chars: text.chars().collect(), pos: 0, line, base_col, _text: text }
    }

    fn col(&self) -> usize {
        self.base_col + self.pos
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.bump() {
            Some(c) if c == want => Ok(()),
            other => Err(syntax(
                self.line,
                self.col(),
                format!(
                    "expected '{want}', found {}",
                    other.map(|c| format!("'{c}'")).unwrap_or_else(|| "end of line".into())
                ),
            )),
        }
    }

    fn quoted_string(&mut self) -> Result<String> {
        self.expect('"')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some(c) => out.push(c),
                None => return Err(syntax(self.line, self.col(), "unterminated string")),
            }
        }
    }

    fn identifier(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(syntax(self.line, self.col(), "expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<i64>()
            .map_err(|_| syntax(self.line, self.base_col + start, "expected an integer"))
    }

    /// `["a", "b"]` (list), `[["a"], ["b"]]` (matrix), or `[]` (empty list).
    fn bracketed(&mut self) -> Result<Value> {
        self.expect('[')?;
        self.skip_ws();
        match self.peek() {
            Some(']') => {
                self.bump();
                Ok(Value::List(Vec::new()))
            }
            Some('[') => {
                let mut rows = Vec::new();
                loop {
                    rows.push(self.string_row()?);
                    self.skip_ws();
                    match self.bump() {
                        Some(',') => continue,
                        Some(']') => return Ok(Value::Matrix(rows)),
                        _ => {
                            return Err(syntax(self.line, self.col(), "expected ',' or ']'"))
                        }
                    }
                }
            }
            Some('"') => {
                let mut items = Vec::new();
                loop {
                    items.push(self.quoted_string()?);
                    self.skip_ws();
                    match self.bump() {
                        Some(',') => {
                            self.skip_ws();
                            continue;
                        }
                        Some(']') => return Ok(Value::List(items)),
                        _ => {
                            return Err(syntax(self.line, self.col(), "expected ',' or ']'"))
                        }
                    }
                }
            }
            _ => Err(syntax(self.line, self.col(), "expected a string, '[', or ']'")),
        }
    }

    fn string_row(&mut self) -> Result<Vec<String>> {
        self.expect('[')?;
        self.skip_ws();
        let mut row = Vec::new();
        if self.peek() == Some(']') {
            self.bump();
            return Ok(row);
        }
        loop {
            row.push(self.quoted_string()?);
            self.skip_ws();
            match self.bump() {
                Some(',') => {
                    self.skip_ws();
                    continue;
                }
                Some(']') => return Ok(row),
                _ => return Err(syntax(self.line, self.col(), "expected ',' or ']'")),
            }
        }
    }

    fn map(&mut self) -> Result<Value> {
        self.expect('{')?;
        self.skip_ws();
        let mut entries = Vec::new();
        if self.peek() == Some('}') {
            self.bump();
            return Ok(Value::Map(entries));
        }
        loop {
            let key = self.identifier()?;
            self.expect(':')?;
            let v = self.integer()?;
            entries.push((key, v));
            self.skip_ws();
            match self.bump() {
                Some(',') => continue,
                Some('}') => return Ok(Value::Map(entries)),
                _ => return Err(syntax(self.line, self.col(), "expected ',' or '}'")),
            }
        }
    }

    fn value(&mut self) -> Result<Value> {
        self.skip_ws();
        match self.peek() {
            Some('[') => self.bracketed(),
            Some('{') => self.map(),
            Some(c) if c == '-' || c.is_ascii_digit() => Ok(Value::Int(self.integer()?)),
            Some(c) if c.is_alphabetic() || c == '_' => Ok(Value::Word(self.identifier()?)),
            Some('"') => Ok(Value::Word(self.quoted_string()?)),
            other => Err(syntax(
                self.line,
                self.col(),
                format!(
                    "expected a value, found {}",
                    other.map(|c| format!("'{c}'")).unwrap_or_else(|| "end of line".into())
                ),
            )),
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if let Some(c) = self.peek() {
            return Err(syntax(self.line, self.col(), format!("unexpected trailing '{c}'")));
        }
        Ok(())
    }
}

#[derive(Default)]
struct RawDegree {
    gens: Option<(usize, usize)>,
    rels: Option<(Vec<Vec<String>>, usize)>,
}

#[derive(Default)]
struct RawComplex {
    degrees: BTreeMap<i64, RawDegree>,
    diffs: BTreeMap<i64, (Vec<Vec<String>>, usize)>,
}

#[derive(Default)]
struct RawDoc {
    char_p: Option<(i64, usize)>,
    vars: Option<(Vec<String>, usize)>,
    order: Option<(String, usize)>,
    quotient: Option<(Vec<String>, usize)>,
    points: Vec<(String, Vec<String>, usize)>,
    perversities: Vec<(String, Vec<(String, i64)>, usize)>,
    complexes: BTreeMap<String, RawComplex>,
    complex_order: Vec<String>,
    commands: Vec<(usize, Vec<String>)>,
}

const COMMAND_WORDS: [&str; 9] =
    ["validate", "member", "truncate", "pcoh", "dual", "ic", "minimal", "ortho", "gamma"];

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn split_words(line: &str) -> Vec<String> {
    line.split_whitespace().map(|w| w.to_string()).collect()
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses the raw statements without resolving anything.
fn collect(text: &str) -> Result<RawDoc> {
    let mut doc = RawDoc::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = strip_comment(raw_line);
        if line.trim().is_empty() {
            continue;
        }
        let first = line.split_whitespace().next().unwrap_or("");
        if COMMAND_WORDS.contains(&first) {
            doc.commands.push((ln, split_words(line)));
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(syntax(
                ln,
                1,
                format!("expected an assignment or a command, found '{first}'"),
            ));
        };
        let key = line[..eq].trim();
        let key_col = line.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let mut sc = Scanner::new(&line[eq + 1..], ln, eq + 1);
        let value = sc.value()?;
        sc.finish()?;
        assign(&mut doc, key, key_col, value, ln)?;
    }
    Ok(doc)
}

fn assign(doc: &mut RawDoc, key: &str, col: usize, value: Value, ln: usize) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    let dup = |what: &str| syntax(ln, col, format!("{what} is declared twice"));
    match parts.as_slice() {
        ["field", "char"] => {
            let Value::Int(p) = value else {
                return Err(syntax(ln, col, "field.char takes an integer"));
            };
            if doc.char_p.replace((p, ln)).is_some() {
                return Err(dup("field.char"));
            }
        }
        ["ambient", "vars"] => {
            let Value::List(vs) = value else {
                return Err(syntax(ln, col, "ambient.vars takes a list of names"));
            };
            if doc.vars.replace((vs, ln)).is_some() {
                return Err(dup("ambient.vars"));
            }
        }
        ["ambient", "order"] => {
            let Value::Word(w) = value else {
                return Err(syntax(ln, col, "ambient.order takes a word"));
            };
            if doc.order.replace((w, ln)).is_some() {
                return Err(dup("ambient.order"));
            }
        }
        ["quotient"] => {
            let Value::List(vs) = value else {
                return Err(syntax(ln, col, "quotient takes a list of polynomials"));
            };
            if doc.quotient.replace((vs, ln)).is_some() {
                return Err(dup("quotient"));
            }
        }
        ["points", name] => {
            if !is_identifier(name) {
                return Err(syntax(ln, col, format!("invalid point name '{name}'")));
            }
            let Value::List(vs) = value else {
                return Err(syntax(ln, col, "a point takes a list of polynomials"));
            };
            if doc.points.iter().any(|(n, _, _)| n == name) {
                return Err(dup(&format!("point {name}")));
            }
            doc.points.push((name.to_string(), vs, ln));
        }
        ["perversity", name] => {
            if !is_identifier(name) {
                return Err(syntax(ln, col, format!("invalid perversity name '{name}'")));
            }
            let Value::Map(m) = value else {
                return Err(syntax(ln, col, "a perversity takes {point: value, ...}"));
            };
            if doc.perversities.iter().any(|(n, _, _)| n == name) {
                return Err(dup(&format!("perversity {name}")));
            }
            doc.perversities.push((name.to_string(), m, ln));
        }
        ["complex", name, rest @ ..] => {
            if !is_identifier(name) {
                return Err(syntax(ln, col, format!("invalid complex name '{name}'")));
            }
            if !doc.complexes.contains_key(*name) {
                doc.complex_order.push(name.to_string());
            }
            let cx = doc.complexes.entry(name.to_string()).or_default();
            match rest {
                ["degree", deg, field] => {
                    let k: i64 = deg.parse().map_err(|_| {
                        syntax(ln, col, format!("invalid degree '{deg}' in '{key}'"))
                    })?;
                    let slot = cx.degrees.entry(k).or_default();
                    match (*field, value) {
                        ("gens", Value::Int(n)) if n >= 0 => {
                            if slot.gens.replace((n as usize, ln)).is_some() {
                                return Err(dup(&format!("complex.{name}.degree.{k}.gens")));
                            }
                        }
                        ("gens", _) => {
                            return Err(syntax(ln, col, "gens takes a non-negative integer"));
                        }
                        ("rels", Value::Matrix(m)) => {
                            if slot.rels.replace((m, ln)).is_some() {
                                return Err(dup(&format!("complex.{name}.degree.{k}.rels")));
                            }
                        }
                        ("rels", Value::List(l)) if l.is_empty() => {
                            if slot.rels.replace((Vec::new(), ln)).is_some() {
                                return Err(dup(&format!("complex.{name}.degree.{k}.rels")));
                            }
                        }
                        ("rels", _) => {
                            return Err(syntax(ln, col, "rels takes a matrix of polynomials"));
                        }
                        _ => {
                            return Err(syntax(
                                ln,
                                col,
                                format!("unknown degree field '{field}' (want gens or rels)"),
                            ));
                        }
                    }
                }
                ["diff", deg] => {
                    let k: i64 = deg.parse().map_err(|_| {
                        syntax(ln, col, format!("invalid degree '{deg}' in '{key}'"))
                    })?;
                    let m = match value {
                        Value::Matrix(m) => m,
                        Value::List(l) if l.is_empty() => Vec::new(),
                        _ => {
                            return Err(syntax(ln, col, "diff takes a matrix of polynomials"));
                        }
                    };
                    if cx.diffs.insert(k, (m, ln)).is_some() {
                        return Err(dup(&format!("complex.{name}.diff.{k}")));
                    }
                }
                _ => {
                    return Err(syntax(
                        ln,
                        col,
                        format!("unknown complex field in '{key}' (want degree.<k>.gens, degree.<k>.rels, or diff.<k>)"),
                    ));
                }
            }
        }
        _ => return Err(syntax(ln, col, format!("unknown setting '{key}'"))),
    }
    Ok(())
}

fn parse_entry(ring: &Arc<Ring>, text: &str, ln: usize, what: &str) -> Result<Vect> {
    ring.parse_poly(text, ln).map_err(|e| match e {
        Error::Syntax { col, msg, .. } => {
            syntax(ln, col, format!("in {what}: {msg} (entry \"{text}\")"))
        }
        other => other,
    })
}

fn build_matrix(
    ring: &Arc<Ring>,
    rows: &[Vec<String>],
    nrows: usize,
    ncols: usize,
    ln: usize,
    what: &str,
) -> Result<Mat> {
    if rows.len() != nrows {
        return Err(syntax(
            ln,
            1,
            format!("{what}: expected {nrows} rows, found {}", rows.len()),
        ));
    }
    let mut cols = vec![vec![Vect::zero(); nrows]; ncols];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(syntax(
                ln,
                1,
                format!("{what}: row {} has {} entries, expected {ncols}", i + 1, row.len()),
            ));
        }
        for (j, entry) in row.iter().enumerate() {
            cols[j][i] = parse_entry(ring, entry, ln, what)?;
        }
    }
    let cols = cols
        .iter()
        .map(|parts| crate::poly::join_comps(&ring.field, ring.pot(), parts))
        .collect();
    Ok(Mat { rows: nrows, cols })
}

/// Relations are written one row per relation; columns follow generators.
fn build_rels(
    ring: &Arc<Ring>,
    rows: &[Vec<String>],
    gens: usize,
    ln: usize,
    what: &str,
) -> Result<Mat> {
    let mut cols = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != gens {
            return Err(syntax(
                ln,
                1,
                format!(
                    "{what}: relation {} has {} entries, expected one per generator ({gens})",
                    i + 1,
                    row.len()
                ),
            ));
        }
        let parts: Vec<Vect> = row
            .iter()
            .map(|entry| parse_entry(ring, entry, ln, what))
            .collect::<Result<_>>()?;
        cols.push(crate::poly::join_comps(&ring.field, ring.pot(), &parts));
    }
    Ok(Mat { rows: gens, cols })
}

fn resolve_commands(
    raw: &[(usize, Vec<String>)],
    doc: &SessionDocument,
) -> Result<Vec<(usize, Command)>> {
    let mut out = Vec::new();
    for (ln, words) in raw {
        out.push((*ln, resolve_command(*ln, words, doc)?));
    }
    Ok(out)
}

fn resolve_command(ln: usize, words: &[String], doc: &SessionDocument) -> Result<Command> {
    let complex = |name: &String| -> Result<String> {
        if doc.complexes.contains_key(name) {
            Ok(name.clone())
        } else {
            Err(syntax(ln, 1, format!("unknown complex '{name}'")))
        }
    };
    let perversity = |name: &String| -> Result<String> {
        if doc.perversities.contains_key(name) {
            Ok(name.clone())
        } else {
            Err(syntax(ln, 1, format!("unknown perversity '{name}'")))
        }
    };
    let point = |name: &str| -> Result<String> {
        if doc.point_names.iter().any(|n| n == name) {
            Ok(name.to_string())
        } else {
            Err(syntax(ln, 1, format!("unknown point '{name}'")))
        }
    };
    let arity = |want: usize| -> Result<()> {
        if words.len() == want {
            Ok(())
        } else {
            Err(syntax(
                ln,
                1,
                format!("{} takes {} arguments, found {}", words[0], want - 1, words.len() - 1),
            ))
        }
    };
    match words[0].as_str() {
        "validate" => {
            arity(1)?;
            Ok(Command::Validate)
        }
        "member" => {
            if words.len() != 4 && words.len() != 6 {
                return Err(syntax(ln, 1, "usage: member <complex> <perversity> <leq|geq> [--assert <true|false>]"));
            }
            let side = match words[3].as_str() {
                "leq" => Side::Leq,
                "geq" => Side::Geq,
                other => {
                    return Err(syntax(ln, 1, format!("side must be leq or geq, found '{other}'")))
                }
            };
            let assert = if words.len() == 6 {
                if words[4] != "--assert" {
                    return Err(syntax(ln, 1, format!("expected --assert, found '{}'", words[4])));
                }
                match words[5].as_str() {
                    "true" => Some(true),
                    "false" => Some(false),
                    other => {
                        return Err(syntax(
                            ln,
                            1,
                            format!("--assert takes true or false, found '{other}'"),
                        ))
                    }
                }
            } else {
                None
            };
            Ok(Command::Member {
                complex: complex(&words[1])?,
                perversity: perversity(&words[2])?,
                side,
                assert,
            })
        }
        "truncate" => {
            arity(3)?;
            Ok(Command::Truncate { complex: complex(&words[1])?, perversity: perversity(&words[2])? })
        }
        "pcoh" => {
            arity(4)?;
            let k = words[3]
                .parse::<i64>()
                .map_err(|_| syntax(ln, 1, format!("invalid degree '{}'", words[3])))?;
            Ok(Command::Pcoh { complex: complex(&words[1])?, perversity: perversity(&words[2])?, k })
        }
        "dual" => {
            arity(2)?;
            Ok(Command::Dual { complex: complex(&words[1])? })
        }
        "ic" | "minimal" => {
            if words.len() != 5 || words[3] != "--boundary" {
                return Err(syntax(
                    ln,
                    1,
                    format!("usage: {} <complex> <perversity> --boundary <points>", words[0]),
                ));
            }
            let boundary: Vec<String> = words[4]
                .split(',')
                .map(|w| point(w.trim()))
                .collect::<Result<_>>()?;
            let complex = complex(&words[1])?;
            let perversity = perversity(&words[2])?;
            if words[0] == "ic" {
                Ok(Command::Ic { complex, perversity, boundary })
            } else {
                Ok(Command::Minimal { complex, perversity, boundary })
            }
        }
        "ortho" => {
            arity(4)?;
            Ok(Command::Ortho {
                f: complex(&words[1])?,
                g: complex(&words[2])?,
                perversity: perversity(&words[3])?,
            })
        }
        "gamma" => {
            if words.len() != 6 || words[2] != "--ideal" || words[4] != "--cutoff" {
                return Err(syntax(ln, 1, "usage: gamma <complex> --ideal <point> --cutoff <t>"));
            }
            let cutoff = words[5]
                .parse::<usize>()
                .ok()
                .filter(|&t| t >= 1)
                .ok_or_else(|| syntax(ln, 1, format!("invalid cutoff '{}'", words[5])))?;
            Ok(Command::Gamma {
                complex: complex(&words[1])?,
                ideal: point(&words[3])?,
                cutoff,
            })
        }
        other => Err(syntax(ln, 1, format!("unknown command '{other}'"))),
    }
}

/// Parses and fully resolves a session document.
pub fn parse_input(text: &str) -> Result<SessionDocument> {
    let raw = collect(text)?;

    let (p, pline) = raw
        .char_p
        .ok_or_else(|| syntax(1, 1, "missing field.char"))?;
    if !(2..=i64::from(u32::MAX)).contains(&p) || crate::field::Field::new(p as u32).is_none() {
        return Err(syntax(pline, 1, format!("characteristic {p} is not a prime")));
    }
    let (vars, vline) = raw.vars.ok_or_else(|| syntax(1, 1, "missing ambient.vars"))?;
    if vars.is_empty() {
        return Err(syntax(vline, 1, "ambient.vars must name at least one variable"));
    }
    for v in &vars {
        if !is_identifier(v) {
            return Err(syntax(vline, 1, format!("invalid variable name '{v}'")));
        }
    }
    for i in 1..vars.len() {
        if vars[..i].contains(&vars[i]) {
            return Err(syntax(vline, 1, format!("variable '{}' repeats", vars[i])));
        }
    }
    let order = match raw.order {
        None => MonoOrder::GrevLex,
        Some((w, oline)) => match w.as_str() {
            "grevlex" => MonoOrder::GrevLex,
            "lex" => MonoOrder::Lex,
            other => return Err(syntax(oline, 1, format!("unknown order '{other}'"))),
        },
    };
    let ambient = Ring::polynomial(p as u32, vars, order)?;
    let ring = match &raw.quotient {
        None => ambient.clone(),
        Some((gens, qline)) => {
            let parsed: Vec<Vect> = gens
                .iter()
                .map(|g| parse_entry(&ambient, g, *qline, "quotient"))
                .collect::<Result<_>>()?;
            if parsed.iter().all(|v| v.is_zero()) {
                ambient.clone()
            } else {
                crate::groebner::make_quotient(&ambient, parsed)?
            }
        }
    };

    let mut point_names = Vec::new();
    let space = if raw.points.is_empty() {
        None
    } else {
        let mut decls = Vec::new();
        for (name, gens, ln) in &raw.points {
            let parsed: Vec<Vect> = gens
                .iter()
                .map(|g| parse_entry(&ring, g, *ln, &format!("point {name}")))
                .collect::<Result<_>>()?;
            point_names.push(name.clone());
            decls.push((name.clone(), parsed));
        }
        Some(build_space(&ring, &decls)?)
    };

    let mut perversities = BTreeMap::new();
    for (name, entries, ln) in &raw.perversities {
        let Some(space) = &space else {
            return Err(syntax(*ln, 1, "perversities need declared points"));
        };
        let mut map = BTreeMap::new();
        for (pt, v) in entries {
            if !point_names.iter().any(|n| n == pt) {
                return Err(syntax(*ln, 1, format!("unknown point '{pt}' in perversity {name}")));
            }
            if map.insert(pt.clone(), *v).is_some() {
                return Err(syntax(*ln, 1, format!("point '{pt}' repeats in perversity {name}")));
            }
        }
        let built = Perversity::new(space, name, &map)
            .map_err(|e| syntax(*ln, 1, e.to_string()))?;
        perversities.insert(name.clone(), built);
    }

    let mut complexes = BTreeMap::new();
    for (name, rawc) in &raw.complexes {
        let mut terms = BTreeMap::new();
        for (&k, slot) in &rawc.degrees {
            let Some((gens, _)) = slot.gens else {
                let ln = slot.rels.as_ref().map(|(_, l)| *l).unwrap_or(1);
                return Err(syntax(ln, 1, format!("complex.{name}.degree.{k} has rels but no gens")));
            };
            let what = format!("complex.{name}.degree.{k}.rels");
            let rels = match &slot.rels {
                None => Mat { rows: gens, cols: Vec::new() },
                Some((rows, ln)) => build_rels(&ring, rows, gens, *ln, &what)?,
            };
            terms.insert(k, PresentedModule::new(ring.clone(), gens, rels)?);
        }
        let mut diffs = BTreeMap::new();
        for (&k, (rows, ln)) in &rawc.diffs {
            let src = terms.get(&k).map(|m| m.gens).unwrap_or(0);
            let tgt = terms.get(&(k + 1)).map(|m| m.gens).unwrap_or(0);
            let what = format!("complex.{name}.diff.{k}");
            diffs.insert(k, build_matrix(&ring, rows, tgt, src, *ln, &what)?);
        }
        let built = Complex::new(ring.clone(), terms, diffs)
            .map_err(|e| Error::Invalid(format!("complex {name}: {e}")))?;
        complexes.insert(name.clone(), built);
    }

    let mut doc = SessionDocument {
        ring,
        space,
        point_names,
        perversities,
        complexes,
        commands: Vec::new(),
    };
    doc.commands = resolve_commands(&raw.commands, &doc)?;
    Ok(doc)
}

fn quote_list(items: &[String]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| format!("\"{s}\"")).collect();
    format!("[{}]", quoted.join(", "))
}

fn quote_matrix(rows: &[Vec<String>]) -> String {
    let inner: Vec<String> = rows.iter().map(|r| quote_list(r)).collect();
    format!("[{}]", inner.join(", "))
}

/// Renders one command in canonical form.
pub fn command_string(c: &Command) -> String {
    match c {
        Command::Validate => "validate".into(),
        Command::Member { complex, perversity, side, assert } => {
            let side = match side {
                Side::Leq => "leq",
                Side::Geq => "geq",
            };
            let mut s = format!("member {complex} {perversity} {side}");
            if let Some(b) = assert {
                s.push_str(&format!(" --assert {b}"));
            }
            s
        }
        Command::Truncate { complex, perversity } => format!("truncate {complex} {perversity}"),
        Command::Pcoh { complex, perversity, k } => format!("pcoh {complex} {perversity} {k}"),
        Command::Dual { complex } => format!("dual {complex}"),
        Command::Ic { complex, perversity, boundary } => {
            format!("ic {complex} {perversity} --boundary {}", boundary.join(","))
        }
        Command::Minimal { complex, perversity, boundary } => {
            format!("minimal {complex} {perversity} --boundary {}", boundary.join(","))
        }
        Command::Ortho { f, g, perversity } => format!("ortho {f} {g} {perversity}"),
        Command::Gamma { complex, ideal, cutoff } => {
            format!("gamma {complex} --ideal {ideal} --cutoff {cutoff}")
        }
    }
}

/// Renders one complex as session-format assignment lines under `name`.
pub fn complex_lines(name: &str, c: &Complex) -> String {
    let ring = &c.ring;
    let mut out = String::new();
    for (&k, m) in &c.terms {
        out.push_str(&format!("complex.{name}.degree.{k}.gens = {}\n", m.gens));
        if !m.rels.cols.is_empty() {
            let rows = columns_strings(ring, &m.rels);
            out.push_str(&format!("complex.{name}.degree.{k}.rels = {}\n", quote_matrix(&rows)));
        }
    }
    for (&k, d) in &c.diffs {
        // Stored column-per-source-generator; written row-per-target.
        let cols = columns_strings(ring, d);
        let ncols = cols.len();
        let rows: Vec<Vec<String>> = (0..d.rows)
            .map(|i| (0..ncols).map(|j| cols[j][i].clone()).collect())
            .collect();
        out.push_str(&format!("complex.{name}.diff.{k} = {}\n", quote_matrix(&rows)));
    }
    out
}

/// Canonical serialization: parsing the output reproduces the document, and
/// serializing again is byte-identical.
pub fn serialize(doc: &SessionDocument) -> String {
    let ring = &doc.ring;
    let ambient = ring.ambient();
    let mut out = String::new();
    out.push_str(&format!("field.char = {}\n", ring.field.p()));
    out.push_str(&format!("ambient.vars = {}\n", quote_list(&ring.vars)));
    let order = match ring.order {
        MonoOrder::GrevLex => "grevlex",
        MonoOrder::Lex => "lex",
        MonoOrder::Elim { .. } => "grevlex",
    };
    out.push_str(&format!("ambient.order = {order}\n"));
    let qgens: Vec<String> = ring.ideal.iter().map(|g| ambient.poly_string(g)).collect();
    out.push_str(&format!("quotient = {}\n", quote_list(&qgens)));
    if let Some(space) = &doc.space {
        for pt in &space.points {
            let gens: Vec<String> = pt.gens.iter().map(|g| ring.poly_string(g)).collect();
            out.push_str(&format!("points.{} = {}\n", pt.name, quote_list(&gens)));
        }
    }
    for (name, p) in &doc.perversities {
        let space = doc.space.as_ref().expect("perversities imply a space");
        let entries: Vec<String> = space
            .points
            .iter()
            .enumerate()
            .map(|(i, pt)| format!("{}: {}", pt.name, p.value(i)))
            .collect();
        out.push_str(&format!("perversity.{name} = {{{}}}\n", entries.join(", ")));
    }
    for (name, c) in &doc.complexes {
        out.push_str(&complex_lines(name, c));
    }
    for (_, cmd) in &doc.commands {
        out.push_str(&command_string(cmd));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAGSHIP: &str = r#"
# The nilpotent cone at sl2 scale: the quadric cone in three variables.
field.char = 32003
ambient.vars = ["x", "y", "z"]
ambient.order = grevlex
quotient = ["x*y - z^2"]
points.eta = []
points.o = ["x", "y", "z"]
perversity.mid = {eta: -1, o: 0}
complex.IC.degree.-1.gens = 1
complex.SKY.degree.0.gens = 1
complex.SKY.degree.0.rels = [["x"], ["y"], ["z"]]
validate
member IC mid leq --assert true
member IC mid geq --assert true
truncate SKY mid
ortho SKY IC mid
"#;

    #[test]
    fn flagship_session_parses_and_resolves() {
        let doc = parse_input(FLAGSHIP).unwrap();
        assert_eq!(doc.point_names, vec!["eta", "o"]);
        assert_eq!(doc.perversities.len(), 1);
        assert_eq!(doc.complexes.len(), 2);
        assert_eq!(doc.commands.len(), 5);
        let ic = &doc.complexes["IC"];
        assert_eq!(ic.coh_support(), vec![-1]);
        let sky = &doc.complexes["SKY"];
        assert_eq!(sky.cohomology(0).k_dimension(), Some(1));
        assert!(matches!(doc.commands[1].1, Command::Member { assert: Some(true), .. }));
    }

    #[test]
    fn serialization_round_trips_byte_for_byte() {
        let doc = parse_input(FLAGSHIP).unwrap();
        let once = serialize(&doc);
        let doc2 = parse_input(&once).unwrap();
        let twice = serialize(&doc2);
        assert_eq!(once, twice);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let bad = "field.char = 32003\nambient.vars = [\"x\"]\ncomplex.F.degree.0.gens = 1\ncomplex.F.diff.0 = [[\"x y\"]]\n";
        match parse_input(bad).err() {
            Some(Error::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected a syntax error, got {other:?}"),
        }
        let nonprime = "field.char = 32004\nambient.vars = [\"x\"]\n";
        match parse_input(nonprime).err() {
            Some(Error::Syntax { line, msg, .. }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("not a prime"));
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_references_are_named() {
        let doc = format!("{FLAGSHIP}member GHOST mid leq\n");
        match parse_input(&doc).err() {
            Some(Error::Syntax { msg, .. }) => assert!(msg.contains("GHOST")),
            other => panic!("expected a dangling-reference error, got {other:?}"),
        }
        let doc = format!("{FLAGSHIP}ic IC mid --boundary ell\n");
        match parse_input(&doc).err() {
            Some(Error::Syntax { msg, .. }) => assert!(msg.contains("ell")),
            other => panic!("expected a dangling-reference error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_differentials_are_rejected() {
        let bad = "field.char = 32003\nambient.vars = [\"t\"]\n\
                   complex.F.degree.0.gens = 1\ncomplex.F.degree.1.gens = 1\n\
                   complex.F.degree.2.gens = 1\n\
                   complex.F.diff.0 = [[\"t\"]]\ncomplex.F.diff.1 = [[\"t\"]]\n";
        // t then t composes to t^2, not zero.
        match parse_input(bad).err() {
            Some(Error::Invalid(msg)) => assert!(msg.contains("compose to zero")),
            other => panic!("expected an invalid-complex error, got {other:?}"),
        }
    }
}
