//! Builds derivations syntax-directedly from annotated terms.
//!
//! Γ is split between the components of applications, lets and cases by
//! where each higher-order variable occurs; Nat variables are shared. Θ is
//! synthesised bottom-up from the uses of the distinguished variable, so
//! choices need no Θ-split annotation and the call family of a `letrec` may
//! be left for the elaborator to compute. Subsumption is inserted at
//! application arguments, let bodies, case branches and choice arms.

use std::collections::BTreeSet;

use thiserror::Error;

use super::derivation::{check_derivation, CheckError, Derivation, Judgement, LetRecData, Rule, Subject};
use crate::sized::{
    prob_sum_ctx, prob_sum_dist, subtype, subtype_dist, weighted_sum_ctx, DistContext, DistType, Size,
    SizedContext, SizedType,
};
use crate::syntax::{LetRecAnnot, Name, Term, Value};
use crate::walk::{from_distribution_type, is_ast, SizedWalk};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FailureReason {
    #[error("higher-order variable `{0}` is used in two components that both run")]
    Affinity(Name),
    #[error("the call family of a letrec induces {0}, which is not AST")]
    WalkNotAst(SizedWalk),
    #[error("{0}")]
    Constraint(String),
    #[error("the elaborated derivation does not check: {0}")]
    Check(CheckError),
}

/// Elaboration failed at the syntax node `path` (child indices as in
/// `SpanTree`). This is not evidence that the term is untypable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {path:?}: {reason}")]
pub struct ElaborationFailure {
    pub path: Vec<usize>,
    pub reason: FailureReason,
}

/// Elaborates `t` under `Γ | Θ` and re-validates the result.
pub fn elaborate(t: &Term, g: &SizedContext, th: &DistContext) -> Result<Derivation, ElaborationFailure> {
    run(t, g, th, None)
}

/// Like [`elaborate`], checking `t` against `mu` instead of synthesising.
pub fn elaborate_against(t: &Term, g: &SizedContext, th: &DistContext, mu: &DistType) -> Result<Derivation, ElaborationFailure> {
    run(t, g, th, Some(mu))
}

fn run(t: &Term, g: &SizedContext, th: &DistContext, want: Option<&DistType>) -> Result<Derivation, ElaborationFailure> {
    let mut e = Elab { path: Vec::new(), spines: 0 };
    let dv = th.as_ref().map(|(x, mu)| DistVar { name: x.clone(), declared: Some(mu.clone()), rec: None });
    let mut d = match want {
        Some(mu) => e.check_term(t, g, dv.as_ref(), mu)?,
        None => e.synth_term(t, g, dv.as_ref())?,
    };
    match (th, d.theta()) {
        (Some(t), None) => d = weaken(d, t),
        (want, got) if want != got => {
            return e.fail(FailureReason::Constraint(format!(
                "the term uses Θ = {} rather than the given one",
                show_theta(got)
            )));
        }
        _ => {}
    }
    check_derivation(&d).map_err(|err| ElaborationFailure { path: d.syntax_path(err.path()), reason: FailureReason::Check(err) })?;
    Ok(d)
}

/// Elaborates a closed program.
pub fn elaborate_closed(t: &Term) -> Result<Derivation, ElaborationFailure> {
    elaborate(t, &SizedContext::new(), &None)
}

fn show_theta(t: &DistContext) -> String {
    match t {
        None => "∅".into(),
        Some((x, mu)) => format!("{x}: {mu}"),
    }
}

/// The distinguished variable in scope. `rec` holds `(i, ν)` when it is a
/// `letrec` binder; `declared` its type when known up front.
#[derive(Debug, Clone)]
struct DistVar {
    name: Name,
    declared: Option<DistType>,
    rec: Option<(String, DistType)>,
}

type R<T> = Result<T, ElaborationFailure>;

struct Elab {
    path: Vec<usize>,
    spines: usize,
}

fn judgement(gamma: &SizedContext, theta: DistContext, subject: Subject, ty: DistType) -> Judgement {
    Judgement { gamma: gamma.clone(), theta, subject, ty }
}

fn dirac_of(d: &Derivation) -> Option<&SizedType> {
    d.ty().as_dirac()
}

fn nat_inf() -> SizedType {
    SizedType::nat_inf()
}

/// Splits Γ between two components: Nat variables go to both, a
/// higher-order variable to the component where it occurs (the first one
/// if it occurs in neither).
fn split(g: &SizedContext, second_fv: &BTreeSet<Name>) -> (SizedContext, SizedContext) {
    let mut a = SizedContext::new();
    let mut b = SizedContext::new();
    for (x, t) in g {
        if t.underlying().is_nat() {
            a.insert(x.clone(), t.clone());
            b.insert(x.clone(), t.clone());
        } else if second_fv.contains(x) {
            b.insert(x.clone(), t.clone());
        } else {
            a.insert(x.clone(), t.clone());
        }
    }
    (a, b)
}

/// Pushes `theta` into a derivation whose Θ is empty, down to the leaves
/// that admit any Θ.
fn weaken(mut d: Derivation, theta: &(Name, DistType)) -> Derivation {
    if d.theta().is_some() {
        return d;
    }
    let idx: Vec<usize> = match d.rule {
        Rule::Var | Rule::Zero | Rule::LetRec | Rule::VarDist => vec![],
        Rule::Succ | Rule::Sub | Rule::Lambda | Rule::App | Rule::Let => vec![0],
        Rule::Choice => vec![0, 1],
        Rule::Case => vec![1, 2],
    };
    let premises = std::mem::take(&mut d.premises);
    d.premises = premises
        .into_iter()
        .enumerate()
        .map(|(k, p)| if idx.contains(&k) { weaken(p, theta) } else { p })
        .collect();
    d.conclusion.theta = Some(theta.clone());
    d
}

impl Elab {
    fn fail<T>(&self, reason: FailureReason) -> R<T> {
        Err(ElaborationFailure { path: self.path.clone(), reason })
    }

    fn constraint<T>(&self, msg: impl Into<String>) -> R<T> {
        self.fail(FailureReason::Constraint(msg.into()))
    }

    fn at<T>(&mut self, child: usize, f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        self.path.push(child);
        let out = f(self)?;
        self.path.pop();
        Ok(out)
    }

    /// Elaborates a term position; values sit one level down in the tree.
    fn term_at(&mut self, child: usize, t: &Term, g: &SizedContext, dv: Option<&DistVar>, want: Option<&DistType>) -> R<Derivation> {
        self.at(child, |e| match want {
            Some(mu) => e.check_term(t, g, dv, mu),
            None => e.synth_term(t, g, dv),
        })
    }

    /// Wraps `d` in Sub when its type differs from `target`.
    fn coerce(&self, d: Derivation, target: &DistType) -> R<Derivation> {
        if d.ty() == target {
            return Ok(d);
        }
        match subtype_dist(d.ty(), target) {
            Ok(true) => {
                let c = judgement(d.gamma(), d.theta().clone(), d.conclusion.subject.clone(), target.clone());
                Ok(Derivation::node(Rule::Sub, c, vec![d]))
            }
            Ok(false) => self.constraint(format!("`{}` has type {}, which is not a subtype of {target}", d.conclusion.subject, d.ty())),
            Err(e) => self.constraint(e.to_string()),
        }
    }

    fn coerce_value(&self, d: Derivation, target: &SizedType) -> R<Derivation> {
        self.coerce(d, &DistType::dirac(target.clone()))
    }

    fn dv_for<'a>(&self, dv: Option<&'a DistVar>, fv: &BTreeSet<Name>) -> Option<&'a DistVar> {
        dv.filter(|d| fv.contains(&d.name))
    }

    /// Checks that the distinguished variable does not occur in both parts.
    fn affine(&self, dv: Option<&DistVar>, a: &BTreeSet<Name>, b: &BTreeSet<Name>, g: &SizedContext) -> R<()> {
        if let Some(d) = dv {
            if a.contains(&d.name) && b.contains(&d.name) {
                return self.fail(FailureReason::Affinity(d.name.clone()));
            }
        }
        for (x, t) in g {
            if !t.underlying().is_nat() && a.contains(x) && b.contains(x) {
                return self.fail(FailureReason::Affinity(x.clone()));
            }
        }
        Ok(())
    }

    fn synth_term(&mut self, t: &Term, g: &SizedContext, dv: Option<&DistVar>) -> R<Derivation> {
        match t {
            Term::Val(v) => self.at(0, |e| e.synth_value(v, g, dv)),
            Term::App(v, w) => self.app(v, w, g, dv),
            Term::Let(x, m, n) => self.let_in(t, x, m, n, g, dv, None),
            Term::Choice(m, p, n) => {
                let dm = self.term_at(0, m, g, dv, None)?;
                let dn = self.term_at(1, n, g, dv, None)?;
                self.choice_node(t, g, p, dm, dn)
            }
            Term::Case(v, w, z) => self.case(t, v, w, z, g, dv, None),
        }
    }

    fn check_term(&mut self, t: &Term, g: &SizedContext, dv: Option<&DistVar>, mu: &DistType) -> R<Derivation> {
        match (t, mu.as_dirac()) {
            (Term::Val(v), Some(sigma)) => self.at(0, |e| e.check_value(v, g, dv, sigma)),
            (Term::Choice(m, p, n), Some(_)) => {
                let dm = self.term_at(0, m, g, dv, Some(mu))?;
                let dn = self.term_at(1, n, g, dv, Some(mu))?;
                self.choice_node(t, g, p, dm, dn)
            }
            (Term::Let(x, m, n), _) => self.let_in(t, x, m, n, g, dv, Some(mu)),
            (Term::Case(v, w, z), Some(sigma)) => self.case(t, v, w, z, g, dv, Some(sigma)),
            _ => {
                let d = self.synth_term(t, g, dv)?;
                self.coerce(d, mu)
            }
        }
    }

    fn choice_node(&self, t: &Term, g: &SizedContext, p: &crate::Probability, dm: Derivation, dn: Derivation) -> R<Derivation> {
        let theta = prob_sum_ctx(dm.theta(), p, dn.theta()).or_else(|e| self.constraint(e.to_string()))?;
        let ty = prob_sum_dist(dm.ty(), p, dn.ty()).or_else(|e| self.constraint(format!("choice arms: {e}")))?;
        Ok(Derivation::node(Rule::Choice, judgement(g, theta, Subject::from_term(t), ty), vec![dm, dn]))
    }

    fn app(&mut self, v: &Value, w: &Value, g: &SizedContext, dv: Option<&DistVar>) -> R<Derivation> {
        let fv_v = v.free_vars();
        let fv_w = w.free_vars();
        self.affine(dv, &fv_v, &fv_w, g)?;
        let (gv, gw) = split(g, &fv_w);
        let (dvv, dvw) = (self.dv_for(dv, &fv_v), self.dv_for(dv, &fv_w));
        let (dv_node, dw_node) = match v {
            // the head's type is known: check the argument against it
            Value::Var(x) if gv.contains_key(x) => {
                let head = self.at(0, |e| e.synth_value(v, &gv, dvv))?;
                let Some(SizedType::Arrow(dom, _)) = dirac_of(&head) else {
                    return self.constraint(format!("`{x}` is applied but has type {}", head.ty()));
                };
                let dom = (**dom).clone();
                let arg = self.at(1, |e| e.check_value(w, &gw, dvw, &dom))?;
                (head, arg)
            }
            _ => {
                let arg = self.at(1, |e| e.synth_value(w, &gw, dvw))?;
                let arg_ty = dirac_of(&arg).expect("value types are Dirac").clone();
                let head = self.at(0, |e| e.head_at(v, &gv, dvv, &arg_ty))?;
                let Some(SizedType::Arrow(dom, _)) = dirac_of(&head) else {
                    return self.constraint(format!("`{v}` is applied but has type {}", head.ty()));
                };
                let dom = (**dom).clone();
                let arg = self.at(1, |e| e.coerce_value(arg, &dom))?;
                (head, arg)
            }
        };
        let Some(SizedType::Arrow(_, mu)) = dirac_of(&dv_node) else { unreachable!("checked above") };
        let mu = mu.clone();
        let theta = match (dv_node.theta(), dw_node.theta()) {
            (Some(t), None) | (None, Some(t)) => Some(t.clone()),
            (None, None) => None,
            (Some((x, _)), Some(_)) => return self.fail(FailureReason::Affinity(x.clone())),
        };
        let c = judgement(g, theta, Subject::Term(Term::App(v.clone(), w.clone())), mu);
        Ok(Derivation::node(Rule::App, c, vec![dv_node, dw_node]))
    }

    #[allow(clippy::too_many_arguments)]
    fn let_in(&mut self, t: &Term, x: &Name, m: &Term, n: &Term, g: &SizedContext, dv: Option<&DistVar>, want: Option<&DistType>) -> R<Derivation> {
        let fv_m = m.free_vars();
        let mut fv_n = n.free_vars();
        fv_n.remove(x);
        self.affine(dv, &fv_m, &fv_n, g)?;
        let (gm, gn) = split(g, &fv_n);
        let dm = self.term_at(0, m, &gm, self.dv_for(dv, &fv_m), None)?;
        let dvn = self.dv_for(dv, &fv_n);
        let mut premises = vec![];
        let mut psis = Vec::new();
        let mut weights = Vec::new();
        let mut mus = Vec::new();
        for (sigma, p) in dm.ty().iter() {
            let mut gx = gn.clone();
            gx.insert(x.clone(), sigma.clone());
            let dn = self.term_at(1, n, &gx, dvn, want)?;
            psis.push(dn.theta().clone());
            weights.push(p.clone());
            mus.push(dn.ty().clone());
            premises.push(dn);
        }
        let sum = weighted_sum_ctx(&psis, &weights).or_else(|e| self.constraint(e.to_string()))?;
        let theta = match (dm.theta(), &sum) {
            (Some(t), None) | (None, Some(t)) => Some(t.clone()),
            (None, None) => None,
            (Some((y, _)), Some(_)) => return self.fail(FailureReason::Affinity(y.clone())),
        };
        let ty = DistType::mix(weights.iter().zip(&mus)).or_else(|e| self.constraint(e.to_string()))?;
        premises.insert(0, dm);
        Ok(Derivation::node(Rule::Let, judgement(g, theta, Subject::from_term(t), ty), premises))
    }

    #[allow(clippy::too_many_arguments)]
    fn case(&mut self, t: &Term, v: &Value, w: &Value, z: &Value, g: &SizedContext, dv: Option<&DistVar>, want: Option<&SizedType>) -> R<Derivation> {
        let fv_v = v.free_vars();
        if let Some(d) = dv.filter(|d| fv_v.contains(&d.name)) {
            return self.at(0, |e| e.constraint(format!("the scrutinee may not use the distinguished variable `{}`", d.name)));
        }
        let mut gv = SizedContext::new();
        let mut delta = SizedContext::new();
        for (x, ty) in g {
            if ty.underlying().is_nat() || fv_v.contains(x) {
                gv.insert(x.clone(), ty.clone());
            }
            if ty.underlying().is_nat() || !fv_v.contains(x) {
                delta.insert(x.clone(), ty.clone());
            }
        }
        let scrut = self.at(0, |e| e.synth_value(v, &gv, None))?;
        let (scrut, s) = match dirac_of(&scrut) {
            Some(SizedType::Nat(hat)) => match hat.pred() {
                Some(s) => (scrut, s),
                None => (self.at(0, |e| e.coerce_value(scrut, &nat_inf()))?, Size::Inf),
            },
            _ => return self.at(0, |e| e.constraint(format!("scrutinee `{v}` is not a natural number"))),
        };
        let nat_s = SizedType::Nat(s);
        let (dw, dz) = match want {
            Some(sigma) => {
                let arrow = SizedType::arrow(nat_s.clone(), DistType::dirac(sigma.clone()));
                let dw = self.at(1, |e| e.check_value(w, &delta, dv, &arrow))?;
                let dz = self.at(2, |e| e.check_value(z, &delta, dv, sigma))?;
                (dw, dz)
            }
            None => {
                let dz = self.at(2, |e| e.synth_value(z, &delta, dv))?;
                let dw = self.at(1, |e| e.head_at(w, &delta, dv, &nat_s))?;
                let Some(SizedType::Arrow(_, cod)) = dirac_of(&dw) else {
                    return self.at(1, |e| e.constraint("the successor branch is not a function"));
                };
                let tz = dirac_of(&dz).expect("value types are Dirac").clone();
                let mut candidates: Vec<SizedType> = cod.as_dirac().into_iter().cloned().collect();
                candidates.push(tz.clone());
                if tz.underlying().is_nat() {
                    candidates.push(nat_inf());
                }
                let cod = cod.clone();
                let join = candidates.into_iter().find(|c| {
                    subtype_dist(&cod, &DistType::dirac(c.clone())).unwrap_or(false) && subtype(&tz, c).unwrap_or(false)
                });
                let Some(join) = join else {
                    return self.constraint(format!("case branches have incompatible types {cod} and {tz}"));
                };
                let arrow = SizedType::arrow(nat_s.clone(), DistType::dirac(join.clone()));
                let dw = self.at(1, |e| e.coerce_value(dw, &arrow))?;
                let dz = self.at(2, |e| e.coerce_value(dz, &join))?;
                (dw, dz)
            }
        };
        let (dw, dz) = match (dw.theta().clone(), dz.theta().clone()) {
            (a, b) if a == b => (dw, dz),
            (Some(t), None) => (dw, weaken(dz, &t)),
            (None, Some(t)) => (weaken(dw, &t), dz),
            _ => return self.constraint("the case branches use the distinguished variable at different types"),
        };
        let Some(SizedType::Arrow(_, mu)) = dirac_of(&dw) else { unreachable!("successor branch is an arrow") };
        let c = judgement(g, dw.theta().clone(), Subject::from_term(t), mu.clone());
        Ok(Derivation::node(Rule::Case, c, vec![scrut, dw, dz]))
    }

    fn synth_value(&mut self, v: &Value, g: &SizedContext, dv: Option<&DistVar>) -> R<Derivation> {
        let subject = Subject::Value(v.clone());
        match v {
            Value::Var(x) => {
                if let Some(t) = g.get(x) {
                    return Ok(Derivation::leaf(Rule::Var, judgement(g, None, subject, DistType::dirac(t.clone()))));
                }
                match dv.filter(|d| &d.name == x) {
                    Some(d) => {
                        let sigma = match &d.declared {
                            Some(mu) if mu.len() == 1 => mu.iter().next().expect("non-empty").0.clone(),
                            _ => return self.constraint(format!("cannot determine the type of `{x}` here; apply it to an argument")),
                        };
                        Ok(self.var_dist(g, x, sigma))
                    }
                    None => self.constraint(format!("unbound variable `{x}`")),
                }
            }
            Value::Zero => Ok(Derivation::leaf(Rule::Zero, judgement(g, None, subject, DistType::dirac(nat_inf())))),
            Value::Succ(inner) => {
                let d = self.at(0, |e| e.synth_value(inner, g, dv))?;
                let Some(SizedType::Nat(s)) = dirac_of(&d) else {
                    return self.constraint(format!("S is applied to `{inner}` of type {}", d.ty()));
                };
                let ty = DistType::dirac(SizedType::Nat(s.succ()));
                Ok(Derivation::node(Rule::Succ, judgement(g, d.theta().clone(), subject, ty), vec![d]))
            }
            Value::Lam(x, ann, body) => {
                let sigma = ann.clone().unwrap_or_else(nat_inf);
                self.lambda(v, x, sigma, body, g, dv, None)
            }
            Value::LetRec(f, ann, body) => self.letrec(v, f, ann.as_ref(), body, g, dv, &Size::Inf),
        }
    }

    fn check_value(&mut self, v: &Value, g: &SizedContext, dv: Option<&DistVar>, sigma: &SizedType) -> R<Derivation> {
        let subject = Subject::Value(v.clone());
        match (v, sigma) {
            (Value::Zero, SizedType::Nat(s)) if s.pred().is_some() => {
                Ok(Derivation::leaf(Rule::Zero, judgement(g, None, subject, DistType::dirac(sigma.clone()))))
            }
            (Value::Succ(inner), SizedType::Nat(s)) if s.pred().is_some() => {
                let pred = SizedType::Nat(s.pred().expect("successor size"));
                let d = self.at(0, |e| e.check_value(inner, g, dv, &pred))?;
                let ty = DistType::dirac(sigma.clone());
                Ok(Derivation::node(Rule::Succ, judgement(g, d.theta().clone(), subject, ty), vec![d]))
            }
            (Value::Lam(x, ann, body), SizedType::Arrow(dom, cod)) if ann.as_ref().is_none_or(|a| a == &**dom) => {
                self.lambda(v, x, (**dom).clone(), body, g, dv, Some(cod))
            }
            (Value::LetRec(f, ann, body), SizedType::Arrow(dom, _)) if matches!(**dom, SizedType::Nat(_)) => {
                let SizedType::Nat(r) = &**dom else { unreachable!() };
                let d = self.letrec(v, f, ann.as_ref(), body, g, dv, r)?;
                self.coerce_value(d, sigma)
            }
            _ => {
                let d = self.synth_value(v, g, dv)?;
                self.coerce_value(d, sigma)
            }
        }
    }

    /// Types a function position applied to an argument of type `arg`.
    fn head_at(&mut self, v: &Value, g: &SizedContext, dv: Option<&DistVar>, arg: &SizedType) -> R<Derivation> {
        match v {
            Value::Var(x) if !g.contains_key(x) && dv.is_some_and(|d| &d.name == x) => {
                let d = dv.expect("checked");
                let sigma = self.call_type(d, arg)?;
                Ok(self.var_dist(g, x, sigma))
            }
            Value::Lam(x, ann, body) => {
                let sigma = ann.clone().unwrap_or_else(|| arg.clone());
                self.lambda(v, x, sigma, body, g, dv, None)
            }
            Value::LetRec(f, ann, body) => match arg {
                SizedType::Nat(r) => self.letrec(v, f, ann.as_ref(), body, g, dv, r),
                _ => self.constraint(format!("a letrec is applied to an argument of type {arg}")),
            },
            _ => self.synth_value(v, g, dv),
        }
    }

    fn var_dist(&self, g: &SizedContext, x: &Name, sigma: SizedType) -> Derivation {
        let mu = DistType::dirac(sigma);
        let c = judgement(g, Some((x.clone(), mu.clone())), Subject::Value(Value::Var(x.clone())), mu);
        Derivation::leaf(Rule::VarDist, c)
    }

    /// The type at which the distinguished variable is used on `arg`.
    fn call_type(&self, d: &DistVar, arg: &SizedType) -> R<SizedType> {
        let fits = |t: &SizedType| match t {
            SizedType::Arrow(dom, _) => subtype(arg, dom).unwrap_or(false),
            _ => false,
        };
        if let Some(mu) = &d.declared {
            // prefer the tightest declared entry accepting the argument
            let mut fitting: Vec<&SizedType> = mu.iter().map(|(t, _)| t).filter(|t| fits(t)).collect();
            fitting.sort_by(|a, b| {
                let (SizedType::Arrow(da, _), SizedType::Arrow(db, _)) = (a, b) else { unreachable!() };
                let ab = subtype(da, db).unwrap_or(false);
                let ba = subtype(db, da).unwrap_or(false);
                ba.cmp(&ab)
            });
            if let Some(pick) = fitting.iter().find(|t| matches!(t, SizedType::Arrow(dom, _) if **dom == *arg)).or(fitting.first()) {
                return Ok((*pick).clone());
            }
            return self.constraint(format!("no declared type of `{}` in {mu} accepts an argument of type {arg}", d.name));
        }
        let Some((i, nu)) = &d.rec else {
            return self.constraint(format!("the type of `{}` is unknown", d.name));
        };
        match arg {
            SizedType::Nat(s) if s.spine() == Some(i.as_str()) => {
                Ok(SizedType::arrow(arg.clone(), nu.subst(i, s)))
            }
            _ => self.constraint(format!(
                "recursive call of `{}` on an argument of type {arg}, whose size does not have spine {i}",
                d.name
            )),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn lambda(&mut self, v: &Value, x: &Name, sigma: SizedType, body: &Term, g: &SizedContext, dv: Option<&DistVar>, want: Option<&DistType>) -> R<Derivation> {
        if g.contains_key(x) || dv.is_some_and(|d| &d.name == x) {
            return self.constraint(format!("binder `{x}` shadows a variable in scope"));
        }
        let mut gx = g.clone();
        gx.insert(x.clone(), sigma.clone());
        let d = self.term_at(0, body, &gx, dv, want)?;
        let ty = DistType::dirac(SizedType::arrow(sigma, d.ty().clone()));
        Ok(Derivation::node(Rule::Lambda, judgement(g, d.theta().clone(), Subject::Value(v.clone()), ty), vec![d]))
    }

    fn fresh_spine(&mut self, g: &SizedContext) -> String {
        let mut used = Vec::new();
        for t in g.values() {
            t.size_vars(&mut used);
        }
        loop {
            let name = if self.spines == 0 { "i".to_string() } else { format!("i{}", self.spines) };
            self.spines += 1;
            if !used.contains(&name) {
                return name;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn letrec(&mut self, v: &Value, f: &Name, ann: Option<&LetRecAnnot>, body: &Value, g: &SizedContext, dv: Option<&DistVar>, r: &Size) -> R<Derivation> {
        let (i, nu, fixed) = match ann {
            Some(a) => (a.var.clone(), a.nu.clone(), a.family.clone()),
            None => (self.fresh_spine(g), DistType::dirac(nat_inf()), None),
        };
        let mut fv = body.free_vars();
        fv.remove(f);
        if let Some(d) = dv.filter(|d| fv.contains(&d.name)) {
            return self.fail(FailureReason::Affinity(d.name.clone()));
        }
        let mut gp = SizedContext::new();
        for x in &fv {
            let Some(t) = g.get(x) else { continue };
            if !t.underlying().is_nat() {
                return self.fail(FailureReason::Affinity(x.clone()));
            }
            let mut vars = Vec::new();
            t.size_vars(&mut vars);
            if vars.contains(&i) {
                return self.constraint(format!("spine variable {i} of `{f}` occurs in the type of `{x}`"));
            }
            gp.insert(x.clone(), t.clone());
        }
        let fixed_mu = match &fixed {
            Some(fam) => {
                let data = LetRecData { var: i.clone(), nu: nu.clone(), family: fam.clone() };
                Some(data.recursive_type().or_else(|e| self.constraint(e.to_string()))?)
            }
            None => None,
        };
        let dvf = DistVar { name: f.clone(), declared: fixed_mu.clone(), rec: Some((i.clone(), nu.clone())) };
        let hat = Size::var(&i).succ();
        let target = SizedType::arrow(SizedType::Nat(hat.clone()), nu.subst(&i, &hat));
        let mut db = self.at(0, |e| e.check_value(body, &gp, Some(&dvf), &target))?;
        let mu_f = match (db.theta().clone(), fixed_mu) {
            (Some((_, mu)), Some(declared)) if mu != declared => {
                return self.constraint(format!("the recursive calls of `{f}` have type {mu}, but the annotation declares {declared}"));
            }
            (Some((_, mu)), _) => mu,
            (None, Some(declared)) => {
                db = weaken(db, &(f.clone(), declared.clone()));
                declared
            }
            (None, None) => return self.constraint(format!("`{f}` is never called; annotate its call family")),
        };
        let mut family = Vec::new();
        for (t, p) in mu_f.iter() {
            match t {
                SizedType::Arrow(dom, _) => match &**dom {
                    SizedType::Nat(s) => family.push((s.clone(), p.clone())),
                    _ => return self.constraint(format!("`{f}` is called at type {t}")),
                },
                _ => return self.constraint(format!("`{f}` is used at type {t}")),
            }
        }
        if let Ok(walk) = from_distribution_type(&mu_f) {
            if !is_ast(&walk) {
                return self.fail(FailureReason::WalkNotAst(walk));
            }
        }
        let ty = DistType::dirac(SizedType::arrow(SizedType::Nat(r.clone()), nu.subst(&i, r)));
        let data = LetRecData { var: i, nu, family };
        let c = judgement(g, None, Subject::Value(v.clone()), ty);
        Ok(Derivation { rule: Rule::LetRec, conclusion: c, letrec: Some(data), premises: vec![db] })
    }
}
