use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::types::{DistType, SizedType};
use super::{Size, TypeError};
use crate::syntax::Name;
use crate::{Probability, Ratio};

/// `Γ`: variables with sized types.
pub type SizedContext = BTreeMap<Name, SizedType>;

/// `Θ`: empty or exactly one variable with a distribution type.
pub type DistContext = Option<(Name, DistType)>;

/// `μ ⊕_p ν = p·μ + (1−p)·ν`.
pub fn prob_sum_dist(m: &DistType, p: &Probability, n: &DistType) -> Result<DistType, TypeError> {
    if m.underlying() != n.underlying() {
        return Err(TypeError::UnderlyingMismatch);
    }
    let q = p.complement();
    DistType::mix([(p.value(), m), (&q, n)])
}

pub fn prob_sum_ctx(t: &DistContext, p: &Probability, u: &DistContext) -> Result<DistContext, TypeError> {
    match (t, u) {
        (None, None) => Ok(None),
        (Some((x, m)), None) => Ok(Some((x.clone(), m.scale(p.value())?))),
        (None, Some((x, n))) => Ok(Some((x.clone(), n.scale(&p.complement())?))),
        (Some((x, m)), Some((y, n))) => {
            if x != y {
                return Err(TypeError::UndefinedContextSum(format!(
                    "distinguished variables {x} and {y} differ"
                )));
            }
            let sum = prob_sum_dist(m, p, n).map_err(|e| match e {
                TypeError::UnderlyingMismatch => TypeError::UndefinedContextSum(format!(
                    "{x} has underlying types {} and {}",
                    m.underlying(),
                    n.underlying()
                )),
                other => other,
            })?;
            Ok(Some((x.clone(), sum)))
        }
    }
}

/// `Σ p_i · Θ_i`.
///
/// Defined when every `Θ_i` binds the same variable with the same
/// underlying type and `Σ p_i ≤ 1`. A family of empty contexts sums to the
/// empty context.
pub fn weighted_sum_ctx(ts: &[DistContext], ps: &[Ratio]) -> Result<DistContext, TypeError> {
    if ts.is_empty() || ts.len() != ps.len() {
        return Err(TypeError::UndefinedContextSum("family must be non-empty and match its weights".into()));
    }
    let total: Ratio = ps.iter().sum();
    if total > Ratio::one() || ps.iter().any(|p| *p < Ratio::zero()) {
        return Err(TypeError::UndefinedContextSum(format!("weights sum to {total}")));
    }
    if ts.iter().all(Option::is_none) {
        return Ok(None);
    }
    let mut name: Option<&Name> = None;
    let mut parts = Vec::new();
    for (t, p) in ts.iter().zip(ps) {
        let Some((x, mu)) = t else {
            return Err(TypeError::UndefinedContextSum(
                "some but not all contexts of the family are empty".into(),
            ));
        };
        if let Some(prev) = name {
            if prev != x {
                return Err(TypeError::UndefinedContextSum(format!(
                    "distinguished variables {prev} and {x} differ"
                )));
            }
        }
        name = Some(x);
        if !p.is_zero() {
            parts.push((p, mu));
        }
    }
    let first = ts[0].as_ref().map(|(_, m)| m.underlying());
    if ts.iter().any(|t| t.as_ref().map(|(_, m)| m.underlying()) != first) {
        return Err(TypeError::UndefinedContextSum("underlying types differ".into()));
    }
    if parts.is_empty() {
        return Err(TypeError::UndefinedContextSum("all weights are zero".into()));
    }
    let mu = DistType::mix(parts)?;
    Ok(Some((name.expect("non-empty").clone(), mu)))
}

pub fn subst_ctx(g: &SizedContext, i: &str, s: &Size) -> SizedContext {
    g.iter().map(|(x, t)| (x.clone(), t.subst(i, s))).collect()
}

pub fn subst_dist_ctx(t: &DistContext, i: &str, s: &Size) -> DistContext {
    t.as_ref().map(|(x, mu)| (x.clone(), mu.subst(i, s)))
}
