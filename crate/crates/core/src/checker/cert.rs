//! JSON certificates: derivation trees with every term and type written in
//! the concrete syntax, so a certificate can be read and audited by hand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::derivation::{Derivation, Judgement, LetRecData, Rule, Subject};
use super::expectation::{TypedDistribution, TypedTerm};
use crate::ratio::parse_ratio;
use crate::sized::{DistContext, Size, SizedContext};
use crate::syntax::{parse_dist_type, parse_raw, parse_type};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Json(String),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("bad {field} `{text}`: {message}")]
    Syntax { field: &'static str, text: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertFile {
    pub schema_version: u32,
    pub derivation: NodeJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub rule: String,
    pub conclusion: JudgementJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letrec: Option<LetRecJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<NodeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgementJson {
    #[serde(default)]
    pub gamma: BTreeMap<String, String>,
    #[serde(default)]
    pub theta: Option<ThetaJson>,
    pub subject: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaJson {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetRecJson {
    pub var: String,
    pub nu: String,
    pub family: Vec<FamilyJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub size: String,
    pub p: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub schema_version: u32,
    pub trace: Vec<Vec<TraceEntryJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntryJson {
    pub weight: String,
    pub derivation: NodeJson,
}

pub fn node_to_json(d: &Derivation) -> NodeJson {
    let c = &d.conclusion;
    NodeJson {
        rule: d.rule.name().to_string(),
        conclusion: JudgementJson {
            gamma: c.gamma.iter().map(|(x, t)| (x.clone(), t.to_string())).collect(),
            theta: c.theta.as_ref().map(|(x, mu)| ThetaJson { name: x.clone(), ty: mu.to_string() }),
            subject: c.subject.to_string(),
            ty: c.ty.to_string(),
        },
        letrec: d.letrec.as_ref().map(|l| LetRecJson {
            var: l.var.clone(),
            nu: l.nu.to_string(),
            family: l.family.iter().map(|(s, p)| FamilyJson { size: s.to_string(), p: p.to_string() }).collect(),
        }),
        premises: d.premises.iter().map(node_to_json).collect(),
    }
}

fn syntax<T, E: std::fmt::Display>(field: &'static str, text: &str, r: Result<T, E>) -> Result<T, CertError> {
    r.map_err(|e| CertError::Syntax { field, text: text.to_string(), message: e.to_string() })
}

/// `inf`, `i` or `i+k`.
pub fn parse_size(text: &str) -> Option<Size> {
    let t = text.trim();
    if t == "inf" {
        return Some(Size::Inf);
    }
    let (var, offset) = match t.split_once('+') {
        Some((v, k)) => (v.trim(), k.trim().parse().ok()?),
        None => (t, 0),
    };
    let mut chars = var.chars();
    let head = chars.next()?;
    if !(head.is_alphabetic() || head == '_') || !chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        return None;
    }
    Some(Size::fin(var, offset))
}

pub fn node_from_json(n: &NodeJson) -> Result<Derivation, CertError> {
    let rule: Rule = syntax("rule", &n.rule, n.rule.parse())?;
    let c = &n.conclusion;
    let mut gamma = SizedContext::new();
    for (x, t) in &c.gamma {
        gamma.insert(x.clone(), syntax("type", t, parse_type(t))?);
    }
    let theta: DistContext = match &c.theta {
        None => None,
        Some(t) => Some((t.name.clone(), syntax("type", &t.ty, parse_dist_type(&t.ty))?)),
    };
    let subject = Subject::from_term(&syntax("subject", &c.subject, parse_raw(&c.subject))?);
    let ty = syntax("type", &c.ty, parse_dist_type(&c.ty))?;
    let letrec = match &n.letrec {
        None => None,
        Some(l) => {
            let mut family = Vec::new();
            for e in &l.family {
                let s = parse_size(&e.size).ok_or_else(|| CertError::Syntax {
                    field: "size",
                    text: e.size.clone(),
                    message: "expected `inf`, `i` or `i+k`".into(),
                })?;
                let p = parse_ratio(&e.p).ok_or_else(|| CertError::Syntax {
                    field: "probability",
                    text: e.p.clone(),
                    message: "expected a rational `a/b`".into(),
                })?;
                family.push((s, p));
            }
            Some(LetRecData { var: l.var.clone(), nu: syntax("type", &l.nu, parse_dist_type(&l.nu))?, family })
        }
    };
    let premises = n.premises.iter().map(node_from_json).collect::<Result<_, _>>()?;
    Ok(Derivation { rule, conclusion: Judgement { gamma, theta, subject, ty }, letrec, premises })
}

pub fn to_json(d: &Derivation) -> String {
    let file = CertFile { schema_version: SCHEMA_VERSION, derivation: node_to_json(d) };
    serde_json::to_string_pretty(&file).expect("certificate serialises")
}

pub fn from_json(text: &str) -> Result<Derivation, CertError> {
    let file: CertFile = serde_json::from_str(text).map_err(|e| CertError::Json(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CertError::Schema(file.schema_version));
    }
    node_from_json(&file.derivation)
}

pub fn trace_to_json(trace: &[TypedDistribution]) -> Result<String, CertError> {
    let mut out = Vec::new();
    for td in trace {
        let mut row = Vec::new();
        for e in &td.entries {
            let d = e.derivation.as_ref().ok_or_else(|| CertError::Json("trace entry without derivation".into()))?;
            row.push(TraceEntryJson { weight: e.weight.to_string(), derivation: node_to_json(d) });
        }
        out.push(row);
    }
    let file = TraceFile { schema_version: SCHEMA_VERSION, trace: out };
    Ok(serde_json::to_string_pretty(&file).expect("trace serialises"))
}

pub fn trace_from_json(text: &str) -> Result<Vec<TypedDistribution>, CertError> {
    let file: TraceFile = serde_json::from_str(text).map_err(|e| CertError::Json(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CertError::Schema(file.schema_version));
    }
    file.trace
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let weight = parse_ratio(&e.weight).ok_or_else(|| CertError::Syntax {
                        field: "weight",
                        text: e.weight.clone(),
                        message: "expected a rational `a/b`".into(),
                    })?;
                    Ok(TypedTerm::from_derivation(node_from_json(&e.derivation)?, weight))
                })
                .collect::<Result<Vec<_>, CertError>>()
                .map(TypedDistribution::new)
        })
        .collect()
}
