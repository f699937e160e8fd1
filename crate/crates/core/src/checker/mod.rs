//! Checking monadic affine sized-type derivations, elaborating annotated
//! programs into derivations, and the subject-reduction tooling built on
//! expectation types.

mod bound;
pub mod cert;
mod derivation;
mod elaborate;
mod expectation;

pub use bound::{check_nat_bound, interpret, BoundError, SizeEnv};
pub use derivation::{
    check_derivation, context, is_closed_certificate, CheckError, Derivation, Judgement, LetRecData, Rule, Subject,
};
pub use elaborate::{elaborate, elaborate_against, elaborate_closed, ElaborationFailure, FailureReason};
pub use expectation::{
    check_reduction_trace, expectation_type, ExpectationError, TraceCheck, TraceViolation, TypedDistribution,
    TypedTerm,
};
