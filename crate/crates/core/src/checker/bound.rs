//! Semantic probe: the numerals a certified program reaches must fit under
//! the sizes of its type.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::semantics::{eval_n, numeral_masses, EvalError};
use crate::sized::{DistType, Size, SizedType};
use crate::syntax::Term;
use crate::Ratio;

/// A size environment `ρ` mapping size variables to naturals.
pub type SizeEnv = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("{0} is not a distribution over Nat types")]
    NotNat(DistType),
    #[error("size {0} mentions a variable outside the size environment")]
    UnboundSize(Size),
    #[error("result `{0}` is not a numeral")]
    NotNumeral(String),
    #[error("value {value} with mass {mass} has no room under sizes {sizes:?}")]
    BoundViolation { value: u64, mass: Ratio, sizes: Vec<String> },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `⟦s⟧_ρ`; `None` stands for infinity.
pub fn interpret(s: &Size, rho: &SizeEnv) -> Result<Option<u64>, BoundError> {
    match s {
        Size::Inf => Ok(None),
        Size::Fin { var, offset } => match rho.get(var) {
            Some(n) => Ok(Some(n + offset)),
            None => Err(BoundError::UnboundSize(s.clone())),
        },
    }
}

/// Runs `t` for `n` steps and checks that its value mass can be
/// transported onto the entries of `m`, sending numeral `k` only to sizes
/// whose interpretation exceeds `k`.
///
/// The sets of admissible sizes are nested, so Hall's condition reduces to
/// one inequality per numeral: the mass of numerals `≥ k` must fit into the
/// capacity of sizes above `k`.
pub fn check_nat_bound(t: &Term, m: &DistType, n: u64, rho: &SizeEnv) -> Result<(), BoundError> {
    let mut caps: Vec<(Option<u64>, Ratio, String)> = Vec::new();
    for (ty, p) in m.iter() {
        let SizedType::Nat(s) = ty else { return Err(BoundError::NotNat(m.clone())) };
        caps.push((interpret(s, rho)?, p.clone(), s.to_string()));
    }
    let report = eval_n(t, n)?;
    let masses = numeral_masses(&report.value_mass);
    if let Some((v, _)) = report.value_mass.iter().find(|(v, _)| crate::syntax::decode_nat(v).is_none()) {
        return Err(BoundError::NotNumeral(v.to_string()));
    }
    let mut tail = Ratio::zero();
    for (&k, mass) in masses.iter().rev() {
        tail += mass;
        let room: Ratio = caps
            .iter()
            .filter(|(b, _, _)| b.is_none_or(|b| k < b))
            .map(|(_, p, _)| p.clone())
            .sum();
        if tail > room {
            let sizes = caps.iter().map(|(_, p, s)| format!("{s} ^ {p}")).collect();
            return Err(BoundError::BoundViolation { value: k, mass: mass.clone(), sizes });
        }
    }
    Ok(())
}
