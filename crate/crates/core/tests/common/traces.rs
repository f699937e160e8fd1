//! Hand-built typed reduction traces.

use mast_core::checker::*;
use mast_core::dist::Distribution;
use mast_core::semantics::step_dist;
use mast_core::sized::{DistType, Size, SizedContext, SizedType};
use mast_core::syntax::{encode_nat, Term, Value};
use mast_core::{Probability, Ratio};

pub fn r(a: i64, b: i64) -> Ratio {
    Ratio::new(a.into(), b.into())
}

pub fn one() -> Ratio {
    r(1, 1)
}

pub fn nat_s(k: u64) -> SizedType {
    SizedType::Nat(Size::fin("s", k))
}

pub fn closed(subject: Subject, ty: DistType) -> Judgement {
    Judgement { gamma: SizedContext::new(), theta: None, subject, ty }
}

/// `0 : Nat[s+k]` for `k ≥ 1`.
pub fn zero_at(k: u64) -> Derivation {
    Derivation::leaf(Rule::Zero, closed(Subject::Value(Value::Zero), DistType::dirac(nat_s(k))))
}

/// `S^n 0 : Nat[s+k+n]` built from a `Zero` leaf at `Nat[s+k]`.
pub fn numeral_at(n: u64, k: u64) -> Derivation {
    let mut d = zero_at(k);
    for j in 1..=n {
        d = Derivation::node(Rule::Succ, closed(Subject::Value(encode_nat(j)), DistType::dirac(nat_s(k + j))), vec![d]);
    }
    d
}

pub fn choice(left: Derivation, p: Ratio, right: Derivation) -> Derivation {
    let term = Term::Choice(
        Box::new(left.conclusion.subject.to_term()),
        Probability::new(p.clone()).unwrap(),
        Box::new(right.conclusion.subject.to_term()),
    );
    let ty = DistType::mix([(&p, left.ty()), (&(one() - &p), right.ty())]).unwrap();
    Derivation::node(Rule::Choice, closed(Subject::from_term(&term), ty), vec![left, right])
}

pub fn entry(d: Derivation, w: Ratio) -> TypedTerm {
    TypedTerm::from_derivation(d, w)
}

/// `0 ⊕ 0` typed at `{Nat[s+1] ^ 1/2, Nat[s+2] ^ 1/2}` and its one-step reduct.
pub fn zero_choice_trace() -> Vec<TypedDistribution> {
    vec![
        TypedDistribution::new(vec![entry(choice(zero_at(1), r(1, 2), zero_at(2)), one())]),
        TypedDistribution::new(vec![entry(zero_at(1), r(1, 2)), entry(zero_at(2), r(1, 2))]),
    ]
}

/// `(0 ⊕_{1/3} S 0) ⊕_{1/2} S S 0` splits, then splits again.
pub fn nested_choice_trace() -> Vec<TypedDistribution> {
    let inner = choice(zero_at(1), r(1, 3), numeral_at(1, 1));
    let outer = choice(inner.clone(), r(1, 2), numeral_at(2, 1));
    vec![
        TypedDistribution::new(vec![entry(outer, one())]),
        TypedDistribution::new(vec![entry(inner, r(1, 2)), entry(numeral_at(2, 1), r(1, 2))]),
        TypedDistribution::new(vec![
            entry(zero_at(1), r(1, 6)),
            entry(numeral_at(1, 1), r(1, 3)),
            entry(numeral_at(2, 1), r(1, 2)),
        ]),
    ]
}

/// Two copies of the same value typed apart, the case that needs
/// pseudo-representations rather than distributions.
pub fn duplicate_values_trace() -> Vec<TypedDistribution> {
    vec![
        TypedDistribution::new(vec![entry(choice(numeral_at(1, 1), r(1, 4), numeral_at(1, 3)), one())]),
        TypedDistribution::new(vec![entry(numeral_at(1, 1), r(1, 4)), entry(numeral_at(1, 3), r(3, 4))]),
    ]
}

/// The first `steps` reductions of `t`, every support term certified on
/// its own by the elaborator.
pub fn elaborated_trace(t: Term, steps: usize) -> Vec<TypedDistribution> {
    let mut cur = Distribution::dirac(t);
    let mut trace = Vec::new();
    for _ in 0..steps {
        let entries = cur
            .iter()
            .map(|(term, p)| entry(elaborate_closed(term).unwrap_or_else(|e| panic!("{term}: {e:?}")), p.clone()))
            .collect();
        trace.push(TypedDistribution::new(entries));
        cur = step_dist(&cur).unwrap();
    }
    trace
}
