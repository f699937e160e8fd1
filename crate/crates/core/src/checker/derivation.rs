//! Explicit typing derivations for the monadic affine sized type system and
//! their structural validation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::One;
use thiserror::Error;

use crate::sized::{
    positivity_dist, prob_sum_ctx, prob_sum_dist, subtype_dist, weighted_sum_ctx, DistContext, DistType, Size,
    SizedContext, SizedType, TypeError,
};
use crate::syntax::{Name, Term, Value};
use crate::walk::{from_distribution_type, is_ast, SizedWalk};
use crate::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Var,
    /// `Γ | x : σ ⊢ x : σ`, the distinguished variable.
    VarDist,
    Succ,
    Zero,
    Lambda,
    Sub,
    App,
    Choice,
    Let,
    Case,
    LetRec,
}

impl Rule {
    pub const ALL: [Rule; 11] = [
        Rule::Var,
        Rule::VarDist,
        Rule::Succ,
        Rule::Zero,
        Rule::Lambda,
        Rule::Sub,
        Rule::App,
        Rule::Choice,
        Rule::Let,
        Rule::Case,
        Rule::LetRec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Var => "Var",
            Rule::VarDist => "Var'",
            Rule::Succ => "Succ",
            Rule::Zero => "Zero",
            Rule::Lambda => "Lambda",
            Rule::Sub => "Sub",
            Rule::App => "App",
            Rule::Choice => "Choice",
            Rule::Let => "Let",
            Rule::Case => "Case",
            Rule::LetRec => "LetRec",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Rule, String> {
        Rule::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// What a judgement types. Values are never wrapped as terms, so a value
/// subject has exactly one representation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::large_enum_variant)]
pub enum Subject {
    Term(Term),
    Value(Value),
}

impl Subject {
    pub fn from_term(t: &Term) -> Subject {
        match t {
            Term::Val(v) => Subject::Value(v.clone()),
            t => Subject::Term(t.clone()),
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Subject::Term(t) => t.clone(),
            Subject::Value(v) => Term::Val(v.clone()),
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Subject::Value(_))
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Term(t) => write!(f, "{t}"),
            Subject::Value(v) => write!(f, "{v}"),
        }
    }
}

/// `Γ | Θ ⊢ subject : ty`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgement {
    pub gamma: SizedContext,
    pub theta: DistContext,
    pub subject: Subject,
    pub ty: DistType,
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (x, t)) in self.gamma.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}: {t}")?;
        }
        write!(f, " | ")?;
        if let Some((x, mu)) = &self.theta {
            write!(f, "{x}: {mu}")?;
        }
        write!(f, " ⊢ {} : {}", self.subject, self.ty)
    }
}

/// Rule data of a `letrec` node: the spine variable, the result type and
/// the sizes and probabilities of the recursive calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetRecData {
    pub var: String,
    pub nu: DistType,
    pub family: Vec<(Size, Ratio)>,
}

impl LetRecData {
    /// `{(Nat^{s_j} → ν[i := s_j])^{p_j}}`.
    pub fn recursive_type(&self) -> Result<DistType, TypeError> {
        DistType::new(
            self.family
                .iter()
                .map(|(s, p)| (SizedType::arrow(SizedType::Nat(s.clone()), self.nu.subst(&self.var, s)), p.clone())),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Judgement,
    pub letrec: Option<LetRecData>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(rule: Rule, conclusion: Judgement) -> Derivation {
        Derivation { rule, conclusion, letrec: None, premises: Vec::new() }
    }

    pub fn node(rule: Rule, conclusion: Judgement, premises: Vec<Derivation>) -> Derivation {
        Derivation { rule, conclusion, letrec: None, premises }
    }

    pub fn ty(&self) -> &DistType {
        &self.conclusion.ty
    }

    pub fn theta(&self) -> &DistContext {
        &self.conclusion.theta
    }

    pub fn gamma(&self) -> &SizedContext {
        &self.conclusion.gamma
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn get(&self, path: &[usize]) -> Option<&Derivation> {
        let mut cur = self;
        for &k in path {
            cur = cur.premises.get(k)?;
        }
        Some(cur)
    }

    /// Every `letrec` node with its path.
    pub fn letrecs(&self) -> Vec<(Vec<usize>, &LetRecData)> {
        fn go<'a>(d: &'a Derivation, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a LetRecData)>) {
            if let Some(data) = &d.letrec {
                out.push((path.clone(), data));
            }
            for (k, p) in d.premises.iter().enumerate() {
                path.push(k);
                go(p, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Translates a premise path into the child path of the subject's
    /// syntax tree (as indexed by `SpanTree`).
    pub fn syntax_path(&self, path: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self;
        for &k in path {
            let Some(next) = cur.premises.get(k) else { break };
            let into_term = match (&cur.conclusion.subject, cur.rule) {
                (_, Rule::Sub) => None,
                (Subject::Term(Term::App(..) | Term::Case(..)), _) => {
                    out.push(k);
                    None
                }
                (Subject::Term(Term::Choice(..)), _) => Some(k),
                (Subject::Term(Term::Let(..)), _) => Some(k.min(1)),
                (Subject::Value(Value::Lam(..)), _) => Some(0),
                (Subject::Value(_), _) => {
                    out.push(0);
                    None
                }
                (Subject::Term(Term::Val(_)), _) => None,
            };
            if let Some(child) = into_term {
                out.push(child);
                // a value in term position sits under a `Val` node
                if next.conclusion.subject.is_value() {
                    out.push(0);
                }
            }
            cur = next;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("{rule} at {path:?}: {condition}")]
    RuleViolation { path: Vec<usize>, rule: Rule, condition: String },
    #[error("{rule} at {path:?}: higher-order variable `{name}` is used more than once")]
    AffinityViolation { path: Vec<usize>, rule: Rule, name: Name },
    #[error("LetRec at {path:?}: the induced {walk} is not AST")]
    WalkNotAst { path: Vec<usize>, walk: SizedWalk },
}

impl CheckError {
    pub fn path(&self) -> &[usize] {
        match self {
            CheckError::RuleViolation { path, .. }
            | CheckError::AffinityViolation { path, .. }
            | CheckError::WalkNotAst { path, .. } => path,
        }
    }

    pub fn rule(&self) -> Rule {
        match self {
            CheckError::RuleViolation { rule, .. } | CheckError::AffinityViolation { rule, .. } => *rule,
            CheckError::WalkNotAst { .. } => Rule::LetRec,
        }
    }
}

/// Validates every node of `d` against its rule.
pub fn check_derivation(d: &Derivation) -> Result<(), CheckError> {
    check_at(d, &mut Vec::new())
}

fn check_at(d: &Derivation, path: &mut Vec<usize>) -> Result<(), CheckError> {
    Node { d, path }.check()?;
    for (k, p) in d.premises.iter().enumerate() {
        path.push(k);
        check_at(p, path)?;
        path.pop();
    }
    Ok(())
}

struct Node<'a> {
    d: &'a Derivation,
    path: &'a [usize],
}

type Checked = Result<(), CheckError>;

impl Node<'_> {
    fn fail<T>(&self, condition: impl Into<String>) -> Result<T, CheckError> {
        Err(CheckError::RuleViolation { path: self.path.to_vec(), rule: self.d.rule, condition: condition.into() })
    }

    fn affinity<T>(&self, name: &str) -> Result<T, CheckError> {
        Err(CheckError::AffinityViolation { path: self.path.to_vec(), rule: self.d.rule, name: name.to_string() })
    }

    fn ensure(&self, ok: bool, condition: impl FnOnce() -> String) -> Checked {
        if ok {
            Ok(())
        } else {
            self.fail(condition())
        }
    }

    fn type_error<T>(&self, e: TypeError) -> Result<T, CheckError> {
        self.fail(e.to_string())
    }

    fn premises(&self, n: usize) -> Result<&[Derivation], CheckError> {
        let ps = &self.d.premises;
        self.ensure(ps.len() == n, || format!("expected {n} premise(s), found {}", ps.len()))?;
        Ok(ps)
    }

    fn dirac<'t>(&self, what: &str, mu: &'t DistType) -> Result<&'t SizedType, CheckError> {
        match mu.as_dirac() {
            Some(t) => Ok(t),
            None => self.fail(format!("{what} type {mu} is not Dirac")),
        }
    }

    fn subject_is(&self, p: &Derivation, expected: &Subject, which: &str) -> Checked {
        self.ensure(p.conclusion.subject == *expected, || {
            format!("{which} premise types `{}` instead of `{expected}`", p.conclusion.subject)
        })
    }

    fn same_contexts(&self, p: &Derivation, which: &str) -> Checked {
        let c = &self.d.conclusion;
        self.ensure(p.conclusion.gamma == c.gamma, || format!("{which} premise has a different Γ"))?;
        self.ensure(p.conclusion.theta == c.theta, || format!("{which} premise has a different Θ"))
    }

    fn check(&self) -> Checked {
        let c = &self.d.conclusion;
        if let Some((x, _)) = &c.theta {
            self.ensure(!c.gamma.contains_key(x), || format!("`{x}` is bound in both Γ and Θ"))?;
        }
        if c.subject.is_value() {
            self.dirac("value", &c.ty)?;
        } else {
            self.ensure(c.ty.is_proper(), || format!("term type {} is not proper", c.ty))?;
        }
        if self.d.rule != Rule::LetRec && self.d.letrec.is_some() {
            return self.fail("only LetRec nodes carry letrec data");
        }
        match self.d.rule {
            Rule::Var => self.var(),
            Rule::VarDist => self.var_dist(),
            Rule::Zero => self.zero(),
            Rule::Succ => self.succ(),
            Rule::Lambda => self.lambda(),
            Rule::Sub => self.sub(),
            Rule::App => self.app(),
            Rule::Choice => self.choice(),
            Rule::Let => self.let_in(),
            Rule::Case => self.case(),
            Rule::LetRec => self.letrec(),
        }
    }

    fn var(&self) -> Checked {
        let c = &self.d.conclusion;
        self.premises(0)?;
        let Subject::Value(Value::Var(x)) = &c.subject else { return self.fail("subject is not a variable") };
        match c.gamma.get(x) {
            None => self.fail(format!("`{x}` is not in Γ")),
            Some(t) => self.ensure(c.ty == DistType::dirac(t.clone()), || format!("Γ gives `{x}` type {t}, not {}", c.ty)),
        }
    }

    fn var_dist(&self) -> Checked {
        let c = &self.d.conclusion;
        self.premises(0)?;
        let Subject::Value(Value::Var(x)) = &c.subject else { return self.fail("subject is not a variable") };
        match &c.theta {
            Some((y, mu)) if y == x => {
                self.ensure(*mu == c.ty, || format!("Θ gives `{x}` type {mu}, not {}", c.ty))
            }
            _ => self.fail(format!("Θ must be exactly `{x}` with a Dirac type")),
        }
    }

    fn zero(&self) -> Checked {
        let c = &self.d.conclusion;
        self.premises(0)?;
        self.ensure(c.subject == Subject::Value(Value::Zero), || "subject is not 0".into())?;
        match self.dirac("value", &c.ty)? {
            SizedType::Nat(s) if s.pred().is_some() => Ok(()),
            t => self.fail(format!("0 has type Nat[ŝ] for a size s, not {t}")),
        }
    }

    fn succ(&self) -> Checked {
        let c = &self.d.conclusion;
        let ps = self.premises(1)?;
        let Subject::Value(Value::Succ(v)) = &c.subject else { return self.fail("subject is not a successor") };
        self.subject_is(&ps[0], &Subject::Value((**v).clone()), "the")?;
        self.same_contexts(&ps[0], "the")?;
        let SizedType::Nat(s) = self.dirac("premise", ps[0].ty())? else {
            return self.fail("premise type is not Nat");
        };
        let expected = DistType::dirac(SizedType::Nat(s.succ()));
        self.ensure(c.ty == expected, || format!("conclusion type should be {expected}, found {}", c.ty))
    }

    fn lambda(&self) -> Checked {
        let c = &self.d.conclusion;
        let ps = self.premises(1)?;
        let Subject::Value(Value::Lam(x, ann, body)) = &c.subject else {
            return self.fail("subject is not an abstraction");
        };
        let SizedType::Arrow(sigma, mu) = self.dirac("conclusion", &c.ty)? else {
            return self.fail("conclusion type is not an arrow");
        };
        if let Some(a) = ann {
            self.ensure(**sigma == *a, || format!("binder annotated {a} but typed {sigma}"))?;
        }
        self.ensure(!c.gamma.contains_key(x), || format!("binder `{x}` already in Γ"))?;
        self.ensure(c.theta.as_ref().is_none_or(|(y, _)| y != x), || format!("binder `{x}` is the Θ variable"))?;
        let p = &ps[0];
        self.subject_is(p, &Subject::from_term(body), "body")?;
        let mut extended = c.gamma.clone();
        extended.insert(x.clone(), (**sigma).clone());
        self.ensure(p.conclusion.gamma == extended, || format!("body premise Γ must be Γ, {x}: {sigma}"))?;
        self.ensure(p.conclusion.theta == c.theta, || "body premise has a different Θ".into())?;
        self.ensure(p.ty() == mu, || format!("body has type {}, arrow codomain is {mu}", p.ty()))
    }

    fn sub(&self) -> Checked {
        let c = &self.d.conclusion;
        let ps = self.premises(1)?;
        self.subject_is(&ps[0], &c.subject, "the")?;
        self.same_contexts(&ps[0], "the")?;
        match subtype_dist(ps[0].ty(), &c.ty) {
            Ok(true) => Ok(()),
            Ok(false) => self.fail(format!("{} ⊑ {} does not hold", ps[0].ty(), c.ty)),
            Err(e) => self.type_error(e),
        }
    }

    /// `Γ, Δ` and `Γ, Ξ` merged into `Γ, Δ, Ξ`; the shared part must be Nat.
    fn merge_gamma(&self, a: &SizedContext, b: &SizedContext) -> Result<SizedContext, CheckError> {
        let mut out = a.clone();
        for (x, t) in b {
            match a.get(x) {
                None => {
                    out.insert(x.clone(), t.clone());
                }
                Some(u) if u != t => return self.fail(format!("`{x}` has types {u} and {t} in the two premises")),
                Some(_) if !t.underlying().is_nat() => return self.affinity(x),
                Some(_) => {}
            }
        }
        Ok(out)
    }

    /// `Θ, Ψ`: at most one side may bind a variable.
    fn comma(&self, a: &DistContext, b: &DistContext) -> Result<DistContext, CheckError> {
        match (a, b) {
            (Some((x, _)), Some((y, _))) if x == y => self.affinity(x),
            (Some((x, _)), Some((y, _))) => self.fail(format!("Θ cannot hold both `{x}` and `{y}`")),
            (Some(t), None) | (None, Some(t)) => Ok(Some(t.clone())),
            (None, None) => Ok(None),
        }
    }

    fn app(&self) -> Checked {
        let c = &self.d.conclusion;
        let ps = self.premises(2)?;
        let Subject::Term(Term::App(v, w)) = &c.subject else { return self.fail("subject is not an application") };
        self.subject_is(&ps[0], &Subject::Value(v.clone()), "function")?;
        self.subject_is(&ps[1], &Subject::Value(w.clone()), "argument")?;
        let SizedType::Arrow(sigma, mu) = self.dirac("function", ps[0].ty())? else {
            return self.fail("function type is not an arrow");
        };
        let arg = self.dirac("argument", ps[1].ty())?;
        self.ensure(arg == &**sigma, || format!("argument has type {arg}, function expects {sigma}"))?;
        self.ensure(*mu == c.ty, || format!("conclusion type should be {mu}, found {}", c.ty))?;
        let gamma = self.merge_gamma(ps[0].gamma(), ps[1].gamma())?;
        self.ensure(gamma == c.gamma, || "Γ is not the union of the premise contexts".into())?;
        let theta = self.comma(ps[0].theta(), ps[1].theta())?;
        self.ensure(theta == c.theta, || "Θ is not the union of the premise contexts".into())
    }

    fn choice(&self) -> Checked {
        let c = &self.d.conclusion;
        let ps = self.premises(2)?;
        let Subject::Term(Term::Choice(m, p, n)) = &c.subject else { return self.fail("subject is not a choice") };
        self.subject_is(&ps[0], &Subject::from_term(m), "left")?;
        self.subject_is(&ps[1], &Subject::from_term(n), "right")?;
        for (q, which) in [(&ps[0], "left"), (&ps[1], "right")] {
            self.ensure(*q.gamma() == c.gamma, || format!("{which} premise has a different Γ"))?;
        }
        self.ensure(ps[0].ty().underlying() == ps[1].ty().underlying(), || {
            format!("arms have underlying types {} and {}", ps[0].ty().underlying(), ps[1].ty().underlying())
        })?;
        let theta = match prob_sum_ctx(ps[0].theta(), p, ps[1].theta()) {
            Ok(t) => t,
            Err(e) => return self.type_error(e),
        };
        self.ensure(theta == c.theta, || "Θ is not the probabilistic sum of the premise contexts".into())?;
        let ty = match prob_sum_dist(ps[0].ty(), p, ps[1].ty()) {
            Ok(t) => t,
            Err(e) => return self.type_error(e),
        };
        self.ensure(ty == c.ty, || format!("conclusion type should be {ty}, found {}", c.ty))
    }

    fn let_in(&self) -> Checked {
        let c = &self.d.conclusion;
        let Subject::Term(Term::Let(x, m, n)) = &c.subject else { return self.fail("subject is not a let") };
        let Some(first) = self.d.premises.first() else { return self.fail("missing premises") };
        let family: Vec<(&SizedType, &Ratio)> = first.ty().iter().collect();
        let ps = self.premises(1 + family.len())?;
        self.subject_is(first, &Subject::from_term(m), "bound")?;
        self.ensure(!first.gamma().contains_key(x), || format!("`{x}` already in the bound premise's Γ"))?;
        self.ensure(!c.gamma.contains_key(x), || format!("`{x}` already in Γ"))?;
        let body = Subject::from_term(n);
        let mut xi: Option<SizedContext> = None;
        let mut psis = Vec::new();
        let mut mus = Vec::new();
        for (k, (sigma, _)) in family.iter().enumerate() {
            let q = &ps[k + 1];
            self.subject_is(q, &body, "body")?;
            let mut g = q.gamma().clone();
            match g.remove(x) {
                Some(t) if t == **sigma => {}
                _ => return self.fail(format!("body premise {} must bind `{x}: {sigma}`", k + 1)),
            }
            if let Some((y, _)) = q.theta() {
                self.ensure(y != x, || format!("`{x}` is the Θ variable of a body premise"))?;
            }
            match &xi {
                None => xi = Some(g),
                Some(prev) => self.ensure(*prev == g, || "body premises have different contexts".into())?,
            }
            psis.push(q.theta().clone());
            mus.push(q.ty());
        }
        let weights: Vec<Ratio> = family.iter().map(|(_, p)| (*p).clone()).collect();
        let gamma = self.merge_gamma(first.gamma(), xi.as_ref().expect("non-empty family"))?;
        self.ensure(gamma == c.gamma, || "Γ is not the union of the premise contexts".into())?;
        let sum = match weighted_sum_ctx(&psis, &weights) {
            Ok(t) => t,
            Err(e) => return self.type_error(e),
        };
        let theta = self.comma(first.theta(), &sum)?;
        self.ensure(theta == c.theta, || "Θ is not Θ, Σ p_i·Ψ_i".into())?;
        let ty = match DistType::mix(weights.iter().zip(mus)) {
            Ok(t) => t,
            Err(e) => return self.type_error(e),
        };
        self.ensure(ty == c.ty, || format!("conclusion type should be {ty}, found {}", c.ty))
    }

    fn case(&self) -> Checked {
        let c = &self.d.conclusion;
        let ps = self.premises(3)?;
        let Subject::Term(Term::Case(v, w, z)) = &c.subject else { return self.fail("subject is not a case") };
        self.subject_is(&ps[0], &Subject::Value(v.clone()), "scrutinee")?;
        self.subject_is(&ps[1], &Subject::Value(w.clone()), "successor-branch")?;
        self.subject_is(&ps[2], &Subject::Value(z.clone()), "zero-branch")?;
        self.ensure(ps[0].theta().is_none(), || "the scrutinee premise must have an empty Θ".into())?;
        let SizedType::Nat(hat) = self.dirac("scrutinee", ps[0].ty())? else {
            return self.fail("scrutinee type is not Nat");
        };
        let SizedType::Arrow(dom, mu) = self.dirac("successor-branch", ps[1].ty())? else {
            return self.fail("successor branch type is not an arrow");
        };
        let SizedType::Nat(s) = &**dom else { return self.fail("successor branch domain is not Nat") };
        self.ensure(s.succ() == *hat, || format!("scrutinee size {hat} is not the successor of {s}"))?;
        self.ensure(ps[2].ty() == mu, || format!("zero branch has type {}, successor branch returns {mu}", ps[2].ty()))?;
        self.ensure(*mu == c.ty, || format!("conclusion type should be {mu}, found {}", c.ty))?;
        for (q, which) in [(&ps[1], "successor-branch"), (&ps[2], "zero-branch")] {
            self.ensure(q.theta() == &c.theta, || format!("{which} premise has a different Θ"))?;
        }
        self.ensure(ps[1].gamma() == ps[2].gamma(), || "the branch premises have different Γ".into())?;
        let gamma = self.merge_gamma(ps[0].gamma(), ps[1].gamma())?;
        self.ensure(gamma == c.gamma, || "Γ is not the union of the premise contexts".into())
    }

    fn letrec(&self) -> Checked {
        let c = &self.d.conclusion;
        let ps = self.premises(1)?;
        let Subject::Value(Value::LetRec(f, ann, body)) = &c.subject else {
            return self.fail("subject is not a letrec");
        };
        let Some(data) = &self.d.letrec else { return self.fail("missing letrec rule data") };
        let i = data.var.as_str();
        if let Some(a) = ann {
            self.ensure(a.var == data.var && a.nu == data.nu, || "rule data differs from the source annotation".into())?;
            if let Some(fam) = &a.family {
                let declared = LetRecData { var: a.var.clone(), nu: a.nu.clone(), family: fam.clone() };
                self.ensure(declared.recursive_type() == data.recursive_type(), || {
                    "rule data family differs from the source annotation".into()
                })?;
            }
        }
        let p = &ps[0];
        self.subject_is(p, &Subject::Value((**body).clone()), "body")?;
        for (x, t) in p.gamma() {
            self.ensure(t.underlying().is_nat(), || format!("`{x}: {t}` in the body context is not Nat"))?;
            let mut vars = Vec::new();
            t.size_vars(&mut vars);
            self.ensure(!vars.iter().any(|v| v == i), || format!("spine variable {i} occurs in Γ (`{x}: {t}`)"))?;
            self.ensure(c.gamma.get(x) == Some(t), || format!("`{x}: {t}` is not in the conclusion Γ"))?;
        }
        self.ensure(!p.gamma().contains_key(f), || format!("`{f}` must not be in Γ"))?;
        self.ensure(positivity_dist(i, &data.nu).is_positive(), || format!("{i} is not positive in {}", data.nu))?;
        for (s, _) in &data.family {
            self.ensure(s.spine() == Some(i), || format!("call size {s} does not have spine {i}"))?;
        }
        let mu_f = match data.recursive_type() {
            Ok(t) => t,
            Err(e) => return self.type_error(e),
        };
        match p.theta() {
            Some((g, t)) if g == f && *t == mu_f => {}
            _ => return self.fail(format!("body premise Θ must be `{f}: {mu_f}`")),
        }
        let walk = match from_distribution_type(&mu_f) {
            Ok(w) => w,
            Err(e) => return self.fail(e.to_string()),
        };
        if !is_ast(&walk) {
            return Err(CheckError::WalkNotAst { path: self.path.to_vec(), walk });
        }
        let hat = Size::var(i).succ();
        let expected = DistType::dirac(SizedType::arrow(SizedType::Nat(hat.clone()), data.nu.subst(i, &hat)));
        self.ensure(*p.ty() == expected, || format!("body must have type {expected}, found {}", p.ty()))?;
        match self.dirac("conclusion", &c.ty)? {
            SizedType::Arrow(dom, cod) => match &**dom {
                SizedType::Nat(r) => {
                    let want = data.nu.subst(i, r);
                    self.ensure(*cod == want, || format!("conclusion codomain should be {want}, found {cod}"))
                }
                _ => self.fail("conclusion domain is not Nat"),
            },
            _ => self.fail("conclusion type is not an arrow"),
        }
    }
}

/// A closed judgement `∅ | ∅ ⊢ M : μ` with `μ` proper.
pub fn is_closed_certificate(d: &Derivation) -> bool {
    let c = &d.conclusion;
    c.gamma.is_empty() && c.theta.is_none() && c.ty.total().is_one()
}

/// Helper for building contexts in tests and examples.
pub fn context<const N: usize>(entries: [(&str, SizedType); N]) -> SizedContext {
    entries.into_iter().map(|(x, t)| (x.to_string(), t)).collect::<BTreeMap<_, _>>()
}
