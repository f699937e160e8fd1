use std::fmt::Write as _;
use std::path::Path;

use mast_core::checker::cert::{self, CertError, SCHEMA_VERSION};
use mast_core::checker::{
    check_derivation, check_reduction_trace, elaborate_closed, expectation_type, is_closed_certificate, CheckError,
    Derivation, ElaborationFailure, FailureReason, Subject,
};
use mast_core::ratio::parse_ratio;
use mast_core::semantics::{eval_n, numeral_masses, sample_many};
use mast_core::simple::{check_simple, SimpleContext};
use mast_core::syntax::{decode_nat, parse_with_spans, Span, SpanTree, Term, Value};
use mast_core::walk::{
    from_distribution_type, hitting_probability_from, horizon_table, is_ast, SizedWalk,
};
use mast_core::Ratio;
use serde_json::{json, Map, Value as Json};

use crate::locate::rule_at;
use crate::Outcome;

const OK: u8 = 0;
const REJECT: u8 = 1;
const USAGE: u8 = 2;

fn report(command: &str, fields: Json) -> Json {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Json::Object(f) = fields {
        m.extend(f);
    }
    Json::Object(m)
}

fn usage_error(command: &str, message: String) -> Outcome {
    Outcome {
        code: USAGE,
        text: format!("error: {message}\n"),
        json: report(command, json!({ "status": "error", "error": message })),
        csv: None,
    }
}

struct Program {
    term: Term,
    spans: SpanTree,
}

fn load(command: &str, path: &Path) -> Result<Program, Outcome> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| usage_error(command, format!("cannot read {}: {e}", path.display())))?;
    let (term, spans) = parse_with_spans(&src).map_err(|e| {
        let s = e.span();
        usage_error(command, format!("parse error at {}:{}: {}", s.line, s.col, e.message))
    })?;
    Ok(Program { term, spans })
}

/// A rejection names a kind (e.g. `AffinityViolation(f)`), the rule and
/// the source position it was detected at.
struct Rejection {
    kind: String,
    rule: String,
    at: Span,
    message: String,
}

impl Rejection {
    fn outcome(self, command: &str, file: &Path) -> Outcome {
        let text = format!(
            "no certificate: {} in rule {} at {}:{}\n  {}\n",
            self.kind, self.rule, self.at.line, self.at.col, self.message
        );
        let json = report(
            command,
            json!({
                "file": file.display().to_string(),
                "status": "rejected",
                "error": {
                    "kind": self.kind,
                    "rule": self.rule,
                    "line": self.at.line,
                    "col": self.at.col,
                    "message": self.message,
                },
            }),
        );
        Outcome { code: REJECT, text, json, csv: None }
    }
}

fn check_error_kind(e: &CheckError) -> String {
    match e {
        CheckError::RuleViolation { .. } => "RuleViolation".into(),
        CheckError::AffinityViolation { name, .. } => format!("AffinityViolation({name})"),
        CheckError::WalkNotAst { walk, .. } => format!("WalkNotAST({walk})"),
    }
}

fn from_check_error(d: &Derivation, e: &CheckError, spans: &SpanTree) -> Rejection {
    Rejection {
        kind: check_error_kind(e),
        rule: e.rule().to_string(),
        at: spans.locate(&d.syntax_path(e.path())),
        message: e.to_string(),
    }
}

fn from_failure(p: &Program, f: &ElaborationFailure) -> Rejection {
    let kind = match &f.reason {
        FailureReason::Affinity(x) => format!("AffinityViolation({x})"),
        FailureReason::WalkNotAst(w) => format!("WalkNotAST({w})"),
        FailureReason::Constraint(_) => "ElaborationFailure".into(),
        FailureReason::Check(e) => check_error_kind(e),
    };
    let rule = match &f.reason {
        FailureReason::Check(e) => e.rule().to_string(),
        _ => rule_at(&p.term, &f.path).to_string(),
    };
    Rejection { kind, rule, at: p.spans.locate(&f.path), message: f.reason.to_string() }
}

/// Simple typing first, so affinity errors are reported where they occur.
fn elaborate_program(p: &Program) -> Result<Derivation, Rejection> {
    if let Err(e) = check_simple(&SimpleContext::new(), &p.term) {
        return Err(Rejection {
            kind: e.kind.to_string(),
            rule: e.rule.to_string(),
            at: p.spans.locate(&e.path),
            message: format!("the program is not affinely simply typed: {}", e.kind),
        });
    }
    let d = elaborate_closed(&p.term).map_err(|f| from_failure(p, &f))?;
    check_derivation(&d).map_err(|e| from_check_error(&d, &e, &p.spans))?;
    Ok(d)
}

fn walk_fields(w: &SizedWalk) -> Json {
    json!({
        "walk": w.to_string(),
        "ast": is_ast(w),
        "kill": w.kill().to_string(),
        "drift": w.drift().to_string(),
    })
}

/// Text and json for an accepted closed derivation.
fn certified(command: &str, file: &Path, d: &Derivation, spans: &SpanTree) -> (String, Json) {
    let mut text = String::from("AST certified\n");
    let _ = writeln!(text, "  type: {}", d.conclusion.ty);
    let mut letrecs = Vec::new();
    for (path, data) in d.letrecs() {
        let name = match &d.get(&path).expect("letrec path").conclusion.subject {
            Subject::Value(Value::LetRec(f, _, _)) => f.clone(),
            _ => "?".into(),
        };
        let at = spans.locate(&d.syntax_path(&path));
        let w = data
            .recursive_type()
            .ok()
            .and_then(|mu| from_distribution_type(&mu).ok())
            .expect("a checked letrec induces a walk");
        let _ = writeln!(
            text,
            "  letrec {name} at {}:{}: {w} (kill={}, drift={})",
            at.line,
            at.col,
            w.kill(),
            w.drift()
        );
        let mut entry = walk_fields(&w);
        entry["name"] = json!(name);
        entry["line"] = json!(at.line);
        entry["col"] = json!(at.col);
        letrecs.push(entry);
    }
    let json = report(
        command,
        json!({
            "file": file.display().to_string(),
            "status": "certified",
            "type": d.conclusion.ty.to_string(),
            "derivation_size": d.size(),
            "letrecs": letrecs,
        }),
    );
    (text, json)
}

pub fn check(file: &Path) -> Outcome {
    let p = match load("check", file) {
        Ok(p) => p,
        Err(o) => return o,
    };
    match elaborate_program(&p) {
        Ok(d) => {
            let (text, json) = certified("check", file, &d, &p.spans);
            Outcome { code: OK, text, json, csv: None }
        }
        Err(r) => r.outcome("check", file),
    }
}

pub fn certify(file: &Path, cert_path: Option<&Path>, elaborate: bool) -> Outcome {
    let p = match load("certify", file) {
        Ok(p) => p,
        Err(o) => return o,
    };
    if elaborate {
        let d = match elaborate_program(&p) {
            Ok(d) => d,
            Err(r) => return r.outcome("certify", file),
        };
        let (mut text, mut json) = certified("certify", file, &d, &p.spans);
        let cert_text = cert::to_json(&d);
        match cert_path {
            Some(out) => {
                if let Err(e) = std::fs::write(out, format!("{cert_text}\n")) {
                    return usage_error("certify", format!("cannot write {}: {e}", out.display()));
                }
                let _ = writeln!(text, "  certificate written to {}", out.display());
                json["certificate_path"] = json!(out.display().to_string());
            }
            None => {
                text = format!("{cert_text}\n");
                json["certificate"] = serde_json::from_str(&cert_text).expect("certificate is json");
            }
        }
        return Outcome { code: OK, text, json, csv: None };
    }
    let Some(cert_path) = cert_path else {
        return usage_error("certify", "give --cert FILE, or --elaborate".into());
    };
    let cert_text = match std::fs::read_to_string(cert_path) {
        Ok(t) => t,
        Err(e) => return usage_error("certify", format!("cannot read {}: {e}", cert_path.display())),
    };
    let d = match cert::from_json(&cert_text) {
        Ok(d) => d,
        Err(e @ (CertError::Json(_) | CertError::Schema(_) | CertError::Syntax { .. })) => {
            return usage_error("certify", format!("{}: {e}", cert_path.display()))
        }
    };
    let root = |message: String| Rejection {
        kind: "RuleViolation".into(),
        rule: d.rule.to_string(),
        at: p.spans.span,
        message,
    };
    if d.conclusion.subject.to_term() != p.term {
        return root(format!("the certificate is about `{}`, not this program", d.conclusion.subject))
            .outcome("certify", file);
    }
    if !is_closed_certificate(&d) {
        return root("the certificate must conclude a closed judgement with a proper type".into())
            .outcome("certify", file);
    }
    if let Err(e) = check_derivation(&d) {
        return from_check_error(&d, &e, &p.spans).outcome("certify", file);
    }
    let (text, mut json) = certified("certify", file, &d, &p.spans);
    json["certificate_path"] = json!(cert_path.display().to_string());
    Outcome { code: OK, text, json, csv: None }
}

fn value_row(v: &Value, mass: String) -> Json {
    json!({ "value": v.to_string(), "numeral": decode_nat(v), "mass": mass })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn eval(file: &Path, steps: u64) -> Outcome {
    let p = match load("eval", file) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let r = match eval_n(&p.term, steps) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                code: REJECT,
                text: format!("evaluation error: {e}\n"),
                json: report("eval", json!({ "status": "error", "error": e.to_string() })),
                csv: None,
            }
        }
    };
    let mut text = format!(
        "after {} steps: terminated with probability at least {}\n  residual {}\n",
        r.steps, r.termination_lower_bound, r.residual
    );
    let mut csv = String::from("value,numeral,mass\n");
    let mut rows = Vec::new();
    for (v, p) in r.value_mass.iter() {
        let _ = writeln!(text, "  {v}: {p}");
        let num = decode_nat(v).map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{num},{p}", csv_field(&v.to_string()));
        rows.push(value_row(v, p.to_string()));
    }
    let numerals: Map<String, Json> =
        numeral_masses(&r.value_mass).into_iter().map(|(n, p)| (n.to_string(), json!(p.to_string()))).collect();
    let json = report(
        "eval",
        json!({
            "file": file.display().to_string(),
            "steps": r.steps,
            "termination_lower_bound": r.termination_lower_bound.to_string(),
            "residual": r.residual.to_string(),
            "values": rows,
            "numerals": numerals,
        }),
    );
    Outcome { code: OK, text, json, csv: Some(csv) }
}

pub fn sample(file: &Path, trials: u64, seed: u64, max_steps: u64) -> Outcome {
    let p = match load("sample", file) {
        Ok(p) => p,
        Err(o) => return o,
    };
    if trials == 0 {
        return usage_error("sample", "--trials must be positive".into());
    }
    let r = match sample_many(&p.term, trials, seed, max_steps) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                code: REJECT,
                text: format!("evaluation error: {e}\n"),
                json: report("sample", json!({ "status": "error", "error": e.to_string() })),
                csv: None,
            }
        }
    };
    let freq = |c: u64| format!("{:.6}", c as f64 / trials as f64);
    let mut text = format!(
        "{} of {} runs reached a value within {} steps ({})\n",
        r.terminated(),
        r.trials,
        max_steps,
        freq(r.terminated())
    );
    let mut csv = String::from("value,numeral,count,frequency\n");
    let mut rows = Vec::new();
    for (v, c) in &r.counts {
        let _ = writeln!(text, "  {v}: {c} ({})", freq(*c));
        let num = decode_nat(v).map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{num},{c},{}", csv_field(&v.to_string()), freq(*c));
        rows.push(json!({ "value": v.to_string(), "numeral": decode_nat(v), "count": c, "frequency": freq(*c) }));
    }
    let json = report(
        "sample",
        json!({
            "file": file.display().to_string(),
            "seed": seed,
            "trials": r.trials,
            "max_steps": max_steps,
            "terminated": r.terminated(),
            "timeouts": r.timeouts,
            "termination_frequency": freq(r.terminated()),
            "values": rows,
        }),
    );
    Outcome { code: OK, text, json, csv: Some(csv) }
}

pub fn walk(literal: &str, ast: bool, horizon: Option<u64>, from: u64, hitting: Option<&str>) -> Outcome {
    let w = match SizedWalk::parse(literal) {
        Ok(w) => w,
        Err(e) => return usage_error("walk", e.to_string()),
    };
    let tol = match hitting.map(parse_ratio) {
        None => None,
        Some(Some(t)) if t > Ratio::from_integer(0.into()) => Some(t),
        Some(_) => return usage_error("walk", "--hitting expects a positive rational such as 1/1000000000".into()),
    };
    let show_ast = ast || (horizon.is_none() && tol.is_none());
    let mut text = String::new();
    let mut json = report("walk", walk_fields(&w));
    let mut csv = None;
    if show_ast {
        let _ = writeln!(text, "AST: {}; kill={}; drift={}", is_ast(&w), w.kill(), w.drift());
    }
    if let Some(tol) = tol {
        let h = hitting_probability_from(&w, &tol, from);
        let _ = writeln!(text, "hitting probability from {from}: in [{}, {}]", h.lower, h.upper);
        json["hitting"] = json!({ "from": from, "tol": tol.to_string(), "lower": h.lower.to_string(), "upper": h.upper.to_string() });
    }
    if let Some(n) = horizon {
        let table = horizon_table(&w, n, from);
        let mut rows = Vec::new();
        let mut out = String::from("n,probability\n");
        for (k, p) in table.iter().enumerate() {
            let _ = writeln!(text, "Pr_{k}^({from}) = {p}");
            let _ = writeln!(out, "{k},{p}");
            rows.push(json!({ "n": k, "probability": p.to_string() }));
        }
        json["horizon"] = json!({ "from": from, "steps": n, "table": rows });
        csv = Some(out);
    }
    Outcome { code: OK, text, json, csv }
}

pub fn trace(file: &Path) -> Outcome {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return usage_error("trace", format!("cannot read {}: {e}", file.display())),
    };
    let trace = match cert::trace_from_json(&text) {
        Ok(t) => t,
        Err(e) => return usage_error("trace", format!("{}: {e}", file.display())),
    };
    match check_reduction_trace(&trace) {
        Ok(()) => {
            let expectation = trace.first().and_then(|td| expectation_type(td).ok()).map(|m| m.to_string());
            let mut text = format!("trace ok: {} elements\n", trace.len());
            if let Some(e) = &expectation {
                let _ = writeln!(text, "  expectation type {e}");
            }
            let json = report(
                "trace",
                json!({ "file": file.display().to_string(), "status": "ok", "elements": trace.len(), "expectation": expectation }),
            );
            Outcome { code: OK, text, json, csv: None }
        }
        Err(v) => {
            let check = v.check.letter().to_string();
            let text = format!("TraceViolation({}, {check}): {}\n", v.index, v.detail);
            let json = report(
                "trace",
                json!({
                    "file": file.display().to_string(),
                    "status": "rejected",
                    "error": { "kind": "TraceViolation", "index": v.index, "check": check, "message": v.detail },
                }),
            );
            Outcome { code: REJECT, text, json, csv: None }
        }
    }
}

/// `key,value` lines for the scalar fields of a report.
pub fn flat_csv(j: &Json) -> String {
    let mut out = String::from("key,value\n");
    if let Json::Object(m) = j {
        for (k, v) in m {
            let cell = match v {
                Json::String(s) => s.clone(),
                Json::Number(_) | Json::Bool(_) => v.to_string(),
                Json::Null => String::new(),
                _ => continue,
            };
            let _ = writeln!(out, "{k},{}", csv_field(&cell));
        }
    }
    out
}
