//! Certified almost-sure termination for a call-by-value probabilistic
//! lambda-calculus with natural numbers, `letrec` and binary choice.
//!
//! The crate is organised bottom-up:
//!
//! - [`syntax`]: A-normal-form terms, the `.lop` parser and printer,
//!   substitution.
//! - [`dist`]: finite subdistributions with exact rational weights.
//! - [`semantics`]: the small-step reduction on distributions, n-step
//!   approximations and a seeded Monte-Carlo sampler.
//! - [`simple`]: the affine simple type system.
//! - [`sized`]: sizes, sized and distribution types, subtyping and the
//!   context algebra.
//! - [`walk`]: sized walks (one-counter Markov chains), their AST decision
//!   procedure, exact finite-horizon probabilities and a numeric oracle.
//! - [`checker`]: typing derivations, the certificate checker, an
//!   annotation-driven elaborator, expectation types and reduction traces.

pub mod checker;
pub mod dist;
pub mod ratio;
pub mod semantics;
pub mod simple;
pub mod sized;
pub mod syntax;
pub mod walk;

pub use ratio::{Probability, Ratio};
pub use syntax::{parse, parse_raw, Name, Term, Value};
