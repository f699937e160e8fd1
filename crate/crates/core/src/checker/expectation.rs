//! Typed distributions, expectation types and the check of reduction
//! traces against subject reduction.

use num_traits::{One, Zero};
use thiserror::Error;

use super::derivation::{check_derivation, is_closed_certificate, Derivation};
use crate::dist::{Distribution, PseudoRep};
use crate::semantics::step_dist;
use crate::sized::{DistType, TypeError};
use crate::syntax::Term;
use crate::Ratio;

/// One weighted sequent `(M : μ)^p` of a closed typed distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedTerm {
    pub term: Term,
    pub ty: DistType,
    pub weight: Ratio,
    /// A derivation of `∅ | ∅ ⊢ term : ty`, when one is supplied.
    pub derivation: Option<Derivation>,
}

impl TypedTerm {
    pub fn new(term: Term, ty: DistType, weight: Ratio) -> TypedTerm {
        TypedTerm { term, ty, weight, derivation: None }
    }

    /// Reads the term and type off the derivation's conclusion.
    pub fn from_derivation(d: Derivation, weight: Ratio) -> TypedTerm {
        TypedTerm { term: d.conclusion.subject.to_term(), ty: d.conclusion.ty.clone(), weight, derivation: Some(d) }
    }
}

/// A multiset of weighted typed terms: the typed counterpart of a
/// pseudo-representation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypedDistribution {
    pub entries: Vec<TypedTerm>,
}

impl TypedDistribution {
    pub fn new(entries: Vec<TypedTerm>) -> TypedDistribution {
        TypedDistribution { entries }
    }

    pub fn pseudo_rep(&self) -> PseudoRep<Term> {
        PseudoRep(self.entries.iter().map(|e| (e.term.clone(), e.weight.clone())).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpectationError {
    #[error("a typed distribution needs at least one entry")]
    Empty,
    #[error("weight {0} is not positive")]
    NonPositiveWeight(Ratio),
    #[error("weights sum to {0} > 1")]
    Overweight(Ratio),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// `Σ p_i · μ_i`, merging equal sized types.
pub fn expectation_type(td: &TypedDistribution) -> Result<DistType, ExpectationError> {
    if td.entries.is_empty() {
        return Err(ExpectationError::Empty);
    }
    if let Some(e) = td.entries.iter().find(|e| e.weight <= Ratio::zero()) {
        return Err(ExpectationError::NonPositiveWeight(e.weight.clone()));
    }
    let total: Ratio = td.entries.iter().map(|e| e.weight.clone()).sum();
    if total > Ratio::one() {
        return Err(ExpectationError::Overweight(total));
    }
    let first = td.entries[0].ty.underlying();
    if td.entries.iter().any(|e| e.ty.underlying() != first) {
        return Err(TypeError::UnderlyingMismatch.into());
    }
    Ok(DistType::mix(td.entries.iter().map(|e| (&e.weight, &e.ty)))?)
}

/// Which trace condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceCheck {
    /// (a) a supplied derivation is missing, invalid or not about its entry.
    Derivation,
    /// (b) the terms are not a pseudo-representation of one reduction step.
    Reduction,
    /// (c) the expectation type changed.
    Expectation,
}

impl TraceCheck {
    pub fn letter(self) -> char {
        match self {
            TraceCheck::Derivation => 'a',
            TraceCheck::Reduction => 'b',
            TraceCheck::Expectation => 'c',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace element {index}, check ({}): {detail}", .check.letter())]
pub struct TraceViolation {
    pub index: usize,
    pub check: TraceCheck,
    pub detail: String,
}

/// Validates a trace of closed typed distributions: every entry carries a
/// valid closed derivation of its sequent, each element is a
/// pseudo-representation of one `step_dist` of the previous one, and the
/// expectation type is the same throughout.
pub fn check_reduction_trace(trace: &[TypedDistribution]) -> Result<(), TraceViolation> {
    let fail = |index, check, detail: String| Err(TraceViolation { index, check, detail });
    let mut expectations = Vec::with_capacity(trace.len());
    for (k, td) in trace.iter().enumerate() {
        for (j, e) in td.entries.iter().enumerate() {
            let Some(d) = &e.derivation else {
                return fail(k, TraceCheck::Derivation, format!("entry {j} has no derivation"));
            };
            if !is_closed_certificate(d) {
                return fail(k, TraceCheck::Derivation, format!("entry {j}: the derivation is not closed"));
            }
            if d.conclusion.subject.to_term() != e.term || d.conclusion.ty != e.ty {
                return fail(k, TraceCheck::Derivation, format!("entry {j}: the derivation concludes a different sequent"));
            }
            if let Err(err) = check_derivation(d) {
                return fail(k, TraceCheck::Derivation, format!("entry {j}: {err}"));
            }
        }
        match expectation_type(td) {
            Ok(mu) => expectations.push(mu),
            Err(err) => return fail(k, TraceCheck::Expectation, err.to_string()),
        }
    }
    for k in 1..trace.len() {
        let prev: Distribution<Term> = match trace[k - 1].pseudo_rep().collapse() {
            Ok(d) => d,
            Err(err) => return fail(k - 1, TraceCheck::Reduction, err.to_string()),
        };
        let expected = match step_dist(&prev) {
            Ok(d) => d,
            Err(err) => return fail(k, TraceCheck::Reduction, err.to_string()),
        };
        let got = match trace[k].pseudo_rep().collapse() {
            Ok(d) => d,
            Err(err) => return fail(k, TraceCheck::Reduction, err.to_string()),
        };
        if got != expected {
            return fail(k, TraceCheck::Reduction, format!("expected {expected}, found {got}"));
        }
        if expectations[k] != expectations[k - 1] {
            return fail(
                k,
                TraceCheck::Expectation,
                format!("expectation {} differs from {}", expectations[k], expectations[k - 1]),
            );
        }
    }
    Ok(())
}
