//! Finite subdistributions with exact rational weights.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::syntax::{Term, Value};
use crate::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("total mass {0} exceeds 1")]
    Overflow(Ratio),
    #[error("weight {0} is negative")]
    Negative(Ratio),
}

/// A finite map from elements to positive weights summing to at most one.
/// Zero weights are never stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution<T: Ord>(BTreeMap<T, Ratio>);

impl<T: Ord> Default for Distribution<T> {
    fn default() -> Self {
        Distribution(BTreeMap::new())
    }
}

impl<T: Ord + Clone> Distribution<T> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn dirac(x: T) -> Self {
        Distribution(BTreeMap::from([(x, Ratio::one())]))
    }

    /// Builds a distribution, merging repeated elements.
    pub fn from_entries<I: IntoIterator<Item = (T, Ratio)>>(entries: I) -> Result<Self, DistError> {
        let mut map = BTreeMap::new();
        for (x, p) in entries {
            if p < Ratio::zero() {
                return Err(DistError::Negative(p));
            }
            if !p.is_zero() {
                *map.entry(x).or_insert_with(Ratio::zero) += p;
            }
        }
        let d = Distribution(map);
        let total = d.sum();
        if total > Ratio::one() {
            return Err(DistError::Overflow(total));
        }
        Ok(d)
    }

    pub fn sum(&self) -> Ratio {
        self.0.values().sum()
    }

    pub fn get(&self, x: &T) -> Ratio {
        self.0.get(x).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Ratio)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.0.keys()
    }

    /// `a · d` for `a ∈ [0,1]`.
    pub fn scale(&self, a: &Ratio) -> Self {
        assert!(*a >= Ratio::zero() && *a <= Ratio::one(), "scale factor {a} outside [0,1]");
        if a.is_zero() {
            return Self::empty();
        }
        Distribution(self.0.iter().map(|(x, p)| (x.clone(), p * a)).collect())
    }

    /// Pointwise sum, defined when the total mass stays at most one.
    pub fn add(&self, other: &Self) -> Result<Self, DistError> {
        let mut map = self.0.clone();
        for (x, p) in &other.0 {
            *map.entry(x.clone()).or_insert_with(Ratio::zero) += p;
        }
        let d = Distribution(map);
        let total = d.sum();
        if total > Ratio::one() {
            return Err(DistError::Overflow(total));
        }
        Ok(d)
    }

    /// Adds `p · x` in place without the mass check; callers mixing
    /// normalised parts use this in inner loops.
    pub(crate) fn add_weighted(&mut self, x: T, p: Ratio) {
        if p.is_zero() {
            return;
        }
        *self.0.entry(x).or_insert_with(Ratio::zero) += p;
    }

    /// The pointwise order `d ≼ e`.
    pub fn leq(&self, other: &Self) -> bool {
        self.0.iter().all(|(x, p)| other.0.get(x).is_some_and(|q| p <= q))
    }

    pub fn map<U: Ord + Clone, F: Fn(&T) -> U>(&self, f: F) -> Distribution<U> {
        let mut out = Distribution::empty();
        for (x, p) in &self.0 {
            out.add_weighted(f(x), p.clone());
        }
        out
    }

    pub fn into_map(self) -> BTreeMap<T, Ratio> {
        self.0
    }

    /// The canonical pseudo-representation: one entry per support element.
    pub fn pseudo_rep(&self) -> PseudoRep<T> {
        PseudoRep(self.0.iter().map(|(x, p)| (x.clone(), p.clone())).collect())
    }
}

/// A multiset of weighted elements whose grouping is a distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoRep<T>(pub Vec<(T, Ratio)>);

impl<T: Ord + Clone> PseudoRep<T> {
    pub fn collapse(&self) -> Result<Distribution<T>, DistError> {
        Distribution::from_entries(self.0.iter().cloned())
    }
}

pub fn collapse<T: Ord + Clone>(p: &PseudoRep<T>) -> Result<Distribution<T>, DistError> {
    p.collapse()
}

/// Splits a term distribution into its value part and the rest.
pub fn value_decomposition(d: &Distribution<Term>) -> (Distribution<Term>, Distribution<Term>) {
    let mut vals = Distribution::empty();
    let mut rest = Distribution::empty();
    for (t, p) in d.iter() {
        if t.is_value() {
            vals.add_weighted(t.clone(), p.clone());
        } else {
            rest.add_weighted(t.clone(), p.clone());
        }
    }
    (vals, rest)
}

/// The value part as a distribution over values.
pub fn values_of(d: &Distribution<Term>) -> Distribution<Value> {
    let mut out = Distribution::empty();
    for (t, p) in d.iter() {
        if let Term::Val(v) = t {
            out.add_weighted(v.clone(), p.clone());
        }
    }
    out
}

impl<T: Ord + fmt::Display> fmt::Display for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (x, p)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} ↦ {p}")?;
        }
        write!(f, "}}")
    }
}
