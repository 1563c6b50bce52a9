//! Command execution and reporting.
//!
//! Each command produces a [`Report`]: the canonical command echo, a result
//! payload, and the list of runtime checks that back every boolean claim in
//! it. The structured rendering (JSON with sorted keys, no timing) is the
//! stable machine interface; the human rendering is tabular, includes wall
//! time, and may change between versions.

use crate::complex::{prune_complex, Complex};
use crate::duality::{dualize, dualizing_data};
use crate::engine::{
    ic_extend, minimality_check, orthogonality_check, perverse_cohomology, perverse_truncate,
};
use crate::error::{Error, Result};
use crate::gamma::gamma_sections_oracle;
use crate::member::{costalk_bound, member, stalk_bound, Side};
use crate::module::prune;
use crate::session::{command_string, complex_lines, Command, SessionDocument};
use crate::space::DeclaredSpace;
use serde_json::{json, Map, Value};
use std::sync::Arc;
use std::time::Instant;

/// The outcome of one command.
pub struct Report {
    pub line: usize,
    pub command: String,
    pub payload: Value,
    /// Runtime checks that were actually performed for this payload.
    pub certificates: Vec<String>,
    /// Set when a `--assert` expectation was stated and missed.
    pub assert_failed: bool,
    pub millis: u128,
}

/// Why a run stopped early.
pub enum Failure {
    /// An asserted property came out false; the report itself was produced.
    Assert { line: usize },
    /// A command failed outright.
    Module { line: usize, command: String, error: Error },
}

/// Every report produced, in order, plus the failure that stopped the run.
pub struct RunOutcome {
    pub reports: Vec<Report>,
    pub failure: Option<Failure>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match &self.failure {
            None => 0,
            Some(Failure::Assert { .. }) => 1,
            Some(Failure::Module { error, .. }) => error.exit_code(),
        }
    }
}

fn space_of(doc: &SessionDocument) -> Result<&DeclaredSpace> {
    doc.space
        .as_ref()
        .ok_or_else(|| Error::Invalid("this command needs declared points".into()))
}

fn point_index(doc: &SessionDocument, name: &str) -> Result<usize> {
    doc.point_names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Internal(format!("point '{name}' vanished after resolution")))
}

/// Degree table of cohomology: minimal generator count and, for
/// finite-length modules, the dimension over the ground field.
fn h_table(c: &Arc<Complex>) -> Value {
    let mut table = Map::new();
    for k in c.coh_support() {
        let h = prune(&c.cohomology(k)).0;
        let length = match h.k_dimension() {
            Some(d) => json!(d),
            None => Value::Null,
        };
        table.insert(k.to_string(), json!({ "gens": h.gens, "length": length }));
    }
    Value::Object(table)
}

/// Serialized pruned model plus its cohomology table.
fn complex_payload(name: &str, c: &Arc<Complex>) -> Value {
    let small = prune_complex(c).0;
    json!({ "complex": complex_lines(name, &small), "h": h_table(&small) })
}

fn bool_word(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

/// Executes one resolved command against the session.
pub fn run_command(doc: &SessionDocument, line: usize, cmd: &Command) -> Result<Report> {
    let start = Instant::now();
    let mut certificates = Vec::new();
    let mut assert_failed = false;
    let payload = match cmd {
        Command::Validate => {
            certificates.push(
                "every differential squares to zero and respects the presented relations".into(),
            );
            certificates.push("every name referenced by a command resolves".into(),);
            if !doc.ring.is_polynomial() {
                certificates
                    .push("the quotient ideal carries a confirmed Groebner basis".into());
            }
            json!({
                "complexes": doc.complexes.keys().collect::<Vec<_>>(),
                "perversities": doc.perversities.keys().collect::<Vec<_>>(),
                "points": doc.point_names,
                "result": true,
            })
        }
        Command::Member { complex, perversity, side, assert } => {
            let f = &doc.complexes[complex];
            let space = space_of(doc)?;
            let p = &doc.perversities[perversity];
            let dd = dualizing_data(&doc.ring)?;
            let result = member(f, space, p, *side, &dd)?;
            certificates.push("the support of the complex lies in the declared points".into());
            let mut per_point = Map::new();
            for (i, pt) in space.points.iter().enumerate() {
                let (ok, what) = match side {
                    Side::Leq => (
                        stalk_bound(f, space, i, p.value(i))?,
                        format!("stalk degrees at {} bounded by {}", pt.name, p.value(i)),
                    ),
                    Side::Geq => (
                        costalk_bound(f, space, i, p.value(i), &dd)?,
                        format!("costalk degrees at {} bounded below by {}", pt.name, p.value(i)),
                    ),
                };
                certificates.push(format!("{what}: {}", bool_word(ok)));
                per_point.insert(pt.name.clone(), json!({ "bound": p.value(i), "ok": ok }));
            }
            let mut payload = Map::new();
            payload.insert("result".into(), json!(result));
            payload.insert("per_point".into(), Value::Object(per_point));
            if let Some(want) = assert {
                payload.insert("expected".into(), json!(want));
                assert_failed = result != *want;
            }
            Value::Object(payload)
        }
        Command::Truncate { complex, perversity } => {
            let f = &doc.complexes[complex];
            let space = space_of(doc)?;
            let p = &doc.perversities[perversity];
            let dd = dualizing_data(&doc.ring)?;
            let t = perverse_truncate(f, space, p, &dd)?;
            certificates.push("the lower part satisfies every stalk bound".into());
            certificates
                .push("the shifted upper part satisfies every costalk bound".into());
            certificates
                .push("reassembling the two parts gives a certified quasi-isomorphism".into());
            json!({
                "lower": complex_payload("lower", &t.lower),
                "upper": complex_payload("upper", &t.upper),
                "trace": t.trace,
            })
        }
        Command::Pcoh { complex, perversity, k } => {
            let f = &doc.complexes[complex];
            let space = space_of(doc)?;
            let p = &doc.perversities[perversity];
            let dd = dualizing_data(&doc.ring)?;
            let h = perverse_cohomology(f, space, p, &dd, *k)?;
            certificates.push("each truncation level passed its three checks".into());
            certificates.push("the result passed both heart membership checks".into());
            let mut payload = match complex_payload("h", &h) {
                Value::Object(m) => m,
                _ => unreachable!(),
            };
            payload.insert("zero".into(), json!(h.is_acyclic()));
            Value::Object(payload)
        }
        Command::Dual { complex } => {
            let f = &doc.complexes[complex];
            let dd = dualizing_data(&doc.ring)?;
            let d = dualize(f, &dd)?;
            certificates
                .push("the coordinate ring passed the depth-equals-dimension check".into());
            certificates.push(
                "the dual was computed from a free approximation covering its full amplitude"
                    .into(),
            );
            let mut payload = match complex_payload("dual", &d) {
                Value::Object(m) => m,
                _ => unreachable!(),
            };
            let amplitude = match d.coh_bounds() {
                Some((a, b)) => json!([a, b]),
                None => Value::Null,
            };
            payload.insert("amplitude".into(), amplitude);
            Value::Object(payload)
        }
        Command::Ic { complex, perversity, boundary } => {
            let f = &doc.complexes[complex];
            let space = space_of(doc)?;
            let p = &doc.perversities[perversity];
            let dd = dualizing_data(&doc.ring)?;
            let idx: Vec<usize> =
                boundary.iter().map(|b| point_index(doc, b)).collect::<Result<_>>()?;
            let mid = ic_extend(f, space, p, &idx, &dd)?;
            certificates
                .push("both boundary-shifted perversities are monotone and comonotone".into());
            certificates.push(
                "the extension passed the upper membership check at the raised perversity".into(),
            );
            complex_payload("ic", &mid)
        }
        Command::Minimal { complex, perversity, boundary } => {
            let f = &doc.complexes[complex];
            let space = space_of(doc)?;
            let p = &doc.perversities[perversity];
            let dd = dualizing_data(&doc.ring)?;
            let idx: Vec<usize> =
                boundary.iter().map(|b| point_index(doc, b)).collect::<Result<_>>()?;
            let (no_quotients, no_subobjects) = minimality_check(f, space, p, &idx, &dd)?;
            certificates.push("the complex passed both heart membership checks".into());
            for (b, &i) in boundary.iter().zip(&idx) {
                certificates.push(format!(
                    "strict stalk bound at {b} (degree < {}): {}",
                    p.value(i),
                    bool_word(no_quotients)
                ));
                certificates.push(format!(
                    "strict costalk bound at {b} (degree > {}): {}",
                    p.value(i),
                    bool_word(no_subobjects)
                ));
            }
            json!({
                "no_boundary_quotients": no_quotients,
                "no_boundary_subobjects": no_subobjects,
                "result": no_quotients && no_subobjects,
            })
        }
        Command::Ortho { f, g, perversity } => {
            let fc = &doc.complexes[f];
            let gc = &doc.complexes[g];
            let space = space_of(doc)?;
            let p = &doc.perversities[perversity];
            let dd = dualizing_data(&doc.ring)?;
            let result = orthogonality_check(fc, gc, space, p, &dd)?;
            certificates.push("the first complex passed the lower membership check".into());
            certificates.push(
                "the second complex passed the strictly-upper membership check".into(),
            );
            certificates.push(
                "degree-zero morphisms were computed on a free approximation window".into(),
            );
            json!({ "result": result })
        }
        Command::Gamma { complex, ideal, cutoff } => {
            let f = &doc.complexes[complex];
            let space = space_of(doc)?;
            let i = point_index(doc, ideal)?;
            let pt = &space.points[i];
            let (lo, hi) = match f.coh_bounds() {
                Some((a, b)) => (a, b + (space.dim - pt.dim)),
                None => (0, 0),
            };
            let rows = gamma_sections_oracle(f, &pt.gens, lo, hi, *cutoff)?;
            certificates.push(
                "tower maps are induced from the surjections between thickenings".into(),
            );
            certificates
                .push("stabilization is read from the final two transition maps".into());
            let mut table = Map::new();
            for row in &rows {
                let stage_gens: Vec<usize> =
                    row.modules.iter().map(|m| prune(m).0.gens).collect();
                table.insert(
                    row.degree.to_string(),
                    json!({
                        "stage_gens": stage_gens,
                        "iso_steps": row.iso_steps,
                        "stabilized": row.stabilized,
                    }),
                );
            }
            json!({ "cutoff": cutoff, "degrees": table })
        }
    };
    Ok(Report {
        line,
        command: command_string(cmd),
        payload,
        certificates,
        assert_failed,
        millis: start.elapsed().as_millis(),
    })
}

/// Runs the session's commands in order, stopping at the first failure.
pub fn run_session(doc: &SessionDocument) -> RunOutcome {
    run_selected(doc, &doc.commands)
}

/// Runs a chosen subset of commands with the usual stop-at-failure policy.
pub fn run_selected(doc: &SessionDocument, commands: &[(usize, Command)]) -> RunOutcome {
    let mut reports = Vec::new();
    for (line, cmd) in commands {
        match run_command(doc, *line, cmd) {
            Ok(report) => {
                let failed = report.assert_failed;
                let at = report.line;
                reports.push(report);
                if failed {
                    return RunOutcome {
                        reports,
                        failure: Some(Failure::Assert { line: at }),
                    };
                }
            }
            Err(error) => {
                return RunOutcome {
                    reports,
                    failure: Some(Failure::Module {
                        line: *line,
                        command: command_string(cmd),
                        error,
                    }),
                };
            }
        }
    }
    RunOutcome { reports, failure: None }
}

fn structured_value(r: &Report) -> Value {
    json!({
        "certificates": r.certificates,
        "command": r.command,
        "line": r.line,
        "payload": r.payload,
    })
}

/// Stable machine rendering: JSON with sorted keys and no timing.
pub fn emit_structured(r: &Report) -> String {
    serde_json::to_string_pretty(&structured_value(r)).expect("reports serialize")
}

/// All reports of a run as one JSON array, in execution order.
pub fn emit_structured_many(reports: &[Report]) -> String {
    let arr = Value::Array(reports.iter().map(structured_value).collect());
    serde_json::to_string_pretty(&arr).expect("reports serialize")
}

fn human_table(keyed: &[(&str, &Value)]) -> Option<String> {
    // Degree-keyed tables of {gens, length}: render side by side.
    let mut degrees: Vec<i64> = Vec::new();
    for (_, v) in keyed {
        let obj = v.as_object()?;
        for k in obj.keys() {
            let d = k.parse::<i64>().ok()?;
            if !degrees.contains(&d) {
                degrees.push(d);
            }
        }
    }
    degrees.sort_unstable();
    let mut out = String::new();
    out.push_str("  degree");
    for (name, _) in keyed {
        out.push_str(&format!(" | {name:>14}"));
    }
    out.push('\n');
    for d in degrees {
        out.push_str(&format!("  {d:>6}"));
        for (_, v) in keyed {
            let cell = match v.as_object().and_then(|o| o.get(&d.to_string())) {
                None => "-".to_string(),
                Some(e) => {
                    let gens = e.get("gens").and_then(Value::as_u64).unwrap_or(0);
                    match e.get("length").and_then(Value::as_u64) {
                        Some(l) => format!("{gens} gens, len {l}"),
                        None => format!("{gens} gens"),
                    }
                }
            };
            out.push_str(&format!(" | {cell:>14}"));
        }
        out.push('\n');
    }
    Some(out)
}

/// Human rendering: header, payload highlights, certificates, wall time.
pub fn emit_human(r: &Report) -> String {
    let mut out = format!("== {} (line {}) [{} ms]\n", r.command, r.line, r.millis);
    let obj = r.payload.as_object();
    let mut tables: Vec<(&str, &Value)> = Vec::new();
    if let Some(obj) = obj {
        for (k, v) in obj {
            match (k.as_str(), v) {
                ("lower" | "upper", Value::Object(part)) => {
                    if let Some(h) = part.get("h") {
                        tables.push((k, h));
                    }
                }
                ("h", h) => tables.push(("h", h)),
                ("trace", Value::Array(lines)) => {
                    for l in lines {
                        if let Some(s) = l.as_str() {
                            out.push_str(&format!("  trace: {s}\n"));
                        }
                    }
                }
                ("complex", _) => {}
                ("per_point", Value::Object(per)) => {
                    for (pt, e) in per {
                        out.push_str(&format!(
                            "  {pt}: bound {} -> {}\n",
                            e.get("bound").cloned().unwrap_or(Value::Null),
                            e.get("ok").and_then(Value::as_bool).map(bool_word).unwrap_or("?"),
                        ));
                    }
                }
                ("degrees", Value::Object(rows)) => {
                    for (deg, e) in rows {
                        out.push_str(&format!("  degree {deg}: {e}\n"));
                    }
                }
                _ => out.push_str(&format!("  {k} = {v}\n")),
            }
        }
    } else {
        out.push_str(&format!("  {}\n", r.payload));
    }
    if !tables.is_empty() {
        if let Some(t) = human_table(&tables) {
            out.push_str(&t);
        }
    }
    for c in &r.certificates {
        out.push_str(&format!("  [checked] {c}\n"));
    }
    if r.assert_failed {
        out.push_str("  ASSERTION FAILED\n");
    }
    out
}
