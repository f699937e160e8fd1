//! The affine simple type system.
//!
//! Checking is bidirectional. Every subterm reports the minimal context it
//! actually uses; binary rules then combine those contexts with the affine
//! contraction (application, `let`, scrutinee against branches) or the
//! non-affine one (the two arms of a choice, the two branches of a `case`).
//! Unannotated binders default to `Nat` unless the surrounding rule fixes
//! their type (an argument being applied, a branch of a `case`, a checked
//! position).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Name, Term, Value};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SimpleType {
    Nat,
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn is_nat(&self) -> bool {
        matches!(self, SimpleType::Nat)
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Nat => write!(f, "Nat"),
            SimpleType::Arrow(a, b) if a.is_nat() => write!(f, "Nat -> {b}"),
            SimpleType::Arrow(a, b) => write!(f, "({a}) -> {b}"),
        }
    }
}

pub type SimpleContext = BTreeMap<Name, SimpleType>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimpleErrorKind {
    #[error("AffinityViolation({0})")]
    AffinityViolation(Name),
    #[error("TypeMismatch({0})")]
    TypeMismatch(String),
    #[error("UnboundVariable({0})")]
    UnboundVariable(Name),
    #[error("MissingAnnotation({0})")]
    MissingAnnotation(Name),
}

impl SimpleErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            SimpleErrorKind::AffinityViolation(_) => "AffinityViolation",
            SimpleErrorKind::TypeMismatch(_) => "TypeMismatch",
            SimpleErrorKind::UnboundVariable(_) => "UnboundVariable",
            SimpleErrorKind::MissingAnnotation(_) => "MissingAnnotation",
        }
    }
}

/// A simple-typing failure together with the child path (see
/// [`crate::syntax::SpanTree`]) of the offending node.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct SimpleError {
    pub kind: SimpleErrorKind,
    pub rule: &'static str,
    pub path: Vec<usize>,
}

/// `Γ ∪ Δ`: shared names must carry equal types.
pub fn contract_union(g: &SimpleContext, d: &SimpleContext) -> Result<SimpleContext, SimpleErrorKind> {
    let mut out = g.clone();
    for (x, k) in d {
        match out.get(x) {
            Some(k0) if k0 != k => return Err(SimpleErrorKind::TypeMismatch(x.clone())),
            Some(_) => {}
            None => {
                out.insert(x.clone(), k.clone());
            }
        }
    }
    Ok(out)
}

/// `Γ ⊎ Δ`: shared names are allowed only at type `Nat`.
pub fn contract_affine(g: &SimpleContext, d: &SimpleContext) -> Result<SimpleContext, SimpleErrorKind> {
    let mut out = g.clone();
    for (x, k) in d {
        match out.get(x) {
            Some(k0) if k0 != k => return Err(SimpleErrorKind::TypeMismatch(x.clone())),
            Some(k0) if !k0.is_nat() => return Err(SimpleErrorKind::AffinityViolation(x.clone())),
            Some(_) => {}
            None => {
                out.insert(x.clone(), k.clone());
            }
        }
    }
    Ok(out)
}

/// Simple type of `t` under `g`.
pub fn check_simple(g: &SimpleContext, t: &Term) -> Result<SimpleType, SimpleError> {
    let mut c = Checker::new(g);
    c.synth_term(t).map(|(k, _)| k)
}

/// Checks `t` against a known type.
pub fn check_simple_against(g: &SimpleContext, t: &Term, k: &SimpleType) -> Result<(), SimpleError> {
    let mut c = Checker::new(g);
    c.check_term(t, k).map(|_| ())
}

pub fn check_simple_value(g: &SimpleContext, v: &Value) -> Result<SimpleType, SimpleError> {
    let mut c = Checker::new(g);
    c.synth_value(v).map(|(k, _)| k)
}

type Used = SimpleContext;

#[derive(Clone)]
struct Binding {
    ty: SimpleType,
    defaulted: bool,
}

struct Checker {
    env: Vec<(Name, Binding)>,
    path: Vec<usize>,
}

impl Checker {
    fn new(g: &SimpleContext) -> Checker {
        Checker {
            env: g.iter().map(|(x, k)| (x.clone(), Binding { ty: k.clone(), defaulted: false })).collect(),
            path: Vec::new(),
        }
    }

    fn err(&self, rule: &'static str, kind: SimpleErrorKind) -> SimpleError {
        SimpleError { kind, rule, path: self.path.clone() }
    }

    fn at<T>(&mut self, child: usize, f: impl FnOnce(&mut Self) -> Result<T, SimpleError>) -> Result<T, SimpleError> {
        self.path.push(child);
        let r = f(self);
        if r.is_ok() {
            self.path.pop();
        }
        r
    }

    fn under<T>(
        &mut self,
        x: &Name,
        b: Binding,
        f: impl FnOnce(&mut Self) -> Result<(T, Used), SimpleError>,
    ) -> Result<(T, Used), SimpleError> {
        self.env.push((x.clone(), b));
        let r = f(self);
        self.env.pop();
        r.map(|(k, mut used)| {
            used.remove(x);
            (k, used)
        })
    }

    fn lookup(&self, x: &str) -> Option<&Binding> {
        self.env.iter().rev().find(|(y, _)| y == x).map(|(_, b)| b)
    }

    fn affine(&self, rule: &'static str, a: &Used, b: &Used) -> Result<Used, SimpleError> {
        contract_affine(a, b).map_err(|k| self.err(rule, k))
    }

    fn union(&self, rule: &'static str, a: &Used, b: &Used) -> Result<Used, SimpleError> {
        contract_union(a, b).map_err(|k| self.err(rule, k))
    }

    fn mismatch(&self, rule: &'static str, want: &SimpleType, got: &SimpleType) -> SimpleError {
        self.err(rule, SimpleErrorKind::TypeMismatch(format!("expected {want}, found {got}")))
    }

    fn synth_value(&mut self, v: &Value) -> Result<(SimpleType, Used), SimpleError> {
        match v {
            Value::Var(x) => match self.lookup(x) {
                Some(b) => Ok((b.ty.clone(), Used::from([(x.clone(), b.ty.clone())]))),
                None => Err(self.err("Var", SimpleErrorKind::UnboundVariable(x.clone()))),
            },
            Value::Zero => Ok((SimpleType::Nat, Used::new())),
            Value::Succ(w) => {
                let used = self.at(0, |c| c.check_value(w, &SimpleType::Nat))?;
                Ok((SimpleType::Nat, used))
            }
            Value::Lam(x, ann, body) => {
                let (dom, defaulted) = match ann {
                    Some(t) => (t.underlying(), false),
                    None => (SimpleType::Nat, true),
                };
                let b = Binding { ty: dom.clone(), defaulted };
                let (cod, used) = self.at(0, |c| c.under(x, b, |c| c.synth_term(body)))?;
                Ok((SimpleType::arrow(dom, cod), used))
            }
            Value::LetRec(..) => {
                let k = self.letrec_type(v, None)?;
                let used = self.check_letrec(v, &k)?;
                Ok((k, used))
            }
        }
    }

    fn letrec_type(&self, v: &Value, expected: Option<&SimpleType>) -> Result<SimpleType, SimpleError> {
        let Value::LetRec(_, ann, _) = v else { unreachable!("letrec_type on a non-letrec") };
        let k = match (ann, expected) {
            (Some(a), _) => SimpleType::arrow(SimpleType::Nat, a.nu.underlying()),
            (None, Some(k)) => k.clone(),
            (None, None) => SimpleType::arrow(SimpleType::Nat, SimpleType::Nat),
        };
        match &k {
            SimpleType::Arrow(a, _) if a.is_nat() => Ok(k),
            _ => Err(self.err(
                "letrec",
                SimpleErrorKind::TypeMismatch(format!("recursive functions take Nat, found {k}")),
            )),
        }
    }

    fn check_letrec(&mut self, v: &Value, k: &SimpleType) -> Result<Used, SimpleError> {
        let Value::LetRec(f, _, body) = v else { unreachable!("check_letrec on a non-letrec") };
        let b = Binding { ty: k.clone(), defaulted: false };
        let ((), used) = self.at(0, |c| c.under(f, b, |c| c.check_value(body, k).map(|u| ((), u))))?;
        if let Some((x, _)) = used.iter().find(|(_, t)| !t.is_nat()) {
            return Err(self.err("letrec", SimpleErrorKind::AffinityViolation(x.clone())));
        }
        Ok(used)
    }

    fn check_value(&mut self, v: &Value, k: &SimpleType) -> Result<Used, SimpleError> {
        match (v, k) {
            (Value::Lam(x, ann, body), SimpleType::Arrow(a, b)) => {
                if let Some(t) = ann {
                    let dom = t.underlying();
                    if dom != **a {
                        return Err(self.mismatch("λ", a, &dom));
                    }
                }
                let bind = Binding { ty: (**a).clone(), defaulted: false };
                let ((), used) = self.at(0, |c| c.under(x, bind, |c| c.check_term(body, b).map(|u| ((), u))))?;
                Ok(used)
            }
            (Value::LetRec(..), _) => {
                let k2 = self.letrec_type(v, Some(k))?;
                if k2 != *k {
                    return Err(self.mismatch("letrec", k, &k2));
                }
                self.check_letrec(v, k)
            }
            _ => {
                let (got, used) = self.synth_value(v)?;
                if got != *k {
                    return Err(self.mismatch("Sub", k, &got));
                }
                Ok(used)
            }
        }
    }

    /// Types `v` as a function receiving an argument of type `arg`.
    fn synth_fun(&mut self, v: &Value, arg: &SimpleType, rule: &'static str) -> Result<(SimpleType, Used), SimpleError> {
        match v {
            Value::Lam(x, None, body) => {
                let b = Binding { ty: arg.clone(), defaulted: false };
                let (cod, used) = self.at(0, |c| c.under(x, b, |c| c.synth_term(body)))?;
                Ok((cod, used))
            }
            _ => {
                let (k, used) = self.synth_value(v)?;
                match k {
                    SimpleType::Arrow(a, b) if *a == *arg => Ok((*b, used)),
                    SimpleType::Arrow(a, _) => Err(self.mismatch(rule, &a, arg)),
                    SimpleType::Nat => {
                        if let Value::Var(x) = v {
                            if self.lookup(x).is_some_and(|b| b.defaulted) {
                                return Err(self.err(rule, SimpleErrorKind::MissingAnnotation(x.clone())));
                            }
                        }
                        Err(self.err(rule, SimpleErrorKind::TypeMismatch(format!("`{v}` is not a function"))))
                    }
                }
            }
        }
    }

    fn synth_term(&mut self, t: &Term) -> Result<(SimpleType, Used), SimpleError> {
        match t {
            Term::Val(v) => self.at(0, |c| c.synth_value(v)),
            Term::App(v, w) => {
                let (arg, uw) = self.at(1, |c| c.synth_value(w))?;
                let (res, uv) = self.at(0, |c| c.synth_fun(v, &arg, "App"))?;
                Ok((res, self.affine("App", &uv, &uw)?))
            }
            Term::Let(x, m, n) => {
                let (km, um) = self.at(0, |c| c.synth_term(m))?;
                let b = Binding { ty: km, defaulted: false };
                let (kn, un) = self.at(1, |c| c.under(x, b, |c| c.synth_term(n)))?;
                Ok((kn, self.affine("Let", &um, &un)?))
            }
            Term::Choice(m, _, n) => {
                let (k, um) = self.at(0, |c| c.synth_term(m))?;
                let un = self.at(1, |c| c.check_term(n, &k))?;
                Ok((k, self.union("Choice", &um, &un)?))
            }
            Term::Case(v, w, z) => {
                let uv = self.at(0, |c| c.check_value(v, &SimpleType::Nat))?;
                let (k, uw) = self.at(1, |c| c.synth_fun(w, &SimpleType::Nat, "Case"))?;
                let uz = self.at(2, |c| c.check_value(z, &k))?;
                let branches = self.union("Case", &uw, &uz)?;
                Ok((k, self.affine("Case", &uv, &branches)?))
            }
        }
    }

    fn check_term(&mut self, t: &Term, k: &SimpleType) -> Result<Used, SimpleError> {
        match t {
            Term::Val(v) => self.at(0, |c| c.check_value(v, k)),
            Term::Choice(m, _, n) => {
                let um = self.at(0, |c| c.check_term(m, k))?;
                let un = self.at(1, |c| c.check_term(n, k))?;
                self.union("Choice", &um, &un)
            }
            Term::Let(x, m, n) => {
                let (km, um) = self.at(0, |c| c.synth_term(m))?;
                let b = Binding { ty: km, defaulted: false };
                let ((), un) = self.at(1, |c| c.under(x, b, |c| c.check_term(n, k).map(|u| ((), u))))?;
                self.affine("Let", &um, &un)
            }
            Term::Case(v, w, z) => {
                let uv = self.at(0, |c| c.check_value(v, &SimpleType::Nat))?;
                let fun = SimpleType::arrow(SimpleType::Nat, k.clone());
                let uw = self.at(1, |c| c.check_value(w, &fun))?;
                let uz = self.at(2, |c| c.check_value(z, k))?;
                let branches = self.union("Case", &uw, &uz)?;
                self.affine("Case", &uv, &branches)
            }
            Term::App(..) => {
                let (got, used) = self.synth_term(t)?;
                if got != *k {
                    return Err(self.mismatch("App", k, &got));
                }
                Ok(used)
            }
        }
    }
}
