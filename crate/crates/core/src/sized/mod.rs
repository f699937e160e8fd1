//! Sizes, sized types, distribution types, subtyping and the context
//! algebra of the monadic affine type system.

mod context;
mod size;
mod types;

use thiserror::Error;

pub use context::{
    prob_sum_ctx, prob_sum_dist, subst_ctx, subst_dist_ctx, weighted_sum_ctx, DistContext, SizedContext,
};
pub use size::{size_leq, Size};
pub use types::{positivity, positivity_dist, subtype, subtype_dist, DistType, Positivity, SizedType, SUBTYPE_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("invalid distribution type: {0}")]
    InvalidDistType(String),
    #[error("underlying simple types differ")]
    UnderlyingMismatch,
    #[error("undefined context sum: {0}")]
    UndefinedContextSum(String),
    #[error("subtyping search budget exceeded ({left} x {right} entries)")]
    SearchBudgetExceeded { left: usize, right: usize },
}
