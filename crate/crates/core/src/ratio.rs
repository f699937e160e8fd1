//! Exact rational arithmetic helpers and the choice-label newtype.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Ratio = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Ratio {
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

/// Parses `a/b` or a bare integer `a`. Whitespace around `/` is allowed.
pub fn parse_ratio(text: &str) -> Option<Ratio> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Ratio::new(num, den))
}

/// True when `r` lies in the closed unit interval.
pub fn is_unit(r: &Ratio) -> bool {
    !r.is_negative_ratio() && *r <= Ratio::one()
}

trait SignExt {
    fn is_negative_ratio(&self) -> bool;
}

impl SignExt for Ratio {
    fn is_negative_ratio(&self) -> bool {
        self.numer().sign() == num_bigint::Sign::Minus
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("choice probability {0} is not in the open interval ]0,1[")]
pub struct ProbabilityError(pub String);

/// Label of a probabilistic choice: a rational strictly between 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Probability(Ratio);

impl Probability {
    pub fn new(value: Ratio) -> Result<Self, ProbabilityError> {
        if value > Ratio::zero() && value < Ratio::one() {
            Ok(Probability(value))
        } else {
            Err(ProbabilityError(value.to_string()))
        }
    }

    pub fn half() -> Self {
        Probability(ratio(1, 2))
    }

    pub fn value(&self) -> &Ratio {
        &self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> Ratio {
        Ratio::one() - &self.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_in_lowest_terms() {
        assert_eq!(parse_ratio("2/4"), Some(ratio(1, 2)));
        assert_eq!(parse_ratio(" 3 "), Some(int(3)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("x"), None);
    }

    #[test]
    fn choice_labels_exclude_endpoints() {
        assert!(Probability::new(ratio(2, 3)).is_ok());
        assert!(Probability::new(int(0)).is_err());
        assert!(Probability::new(int(1)).is_err());
        assert!(Probability::new(ratio(3, 2)).is_err());
        assert_eq!(Probability::new(ratio(1, 3)).unwrap().complement(), ratio(2, 3));
    }

    #[test]
    fn unit_interval() {
        assert!(is_unit(&int(0)));
        assert!(is_unit(&int(1)));
        assert!(!is_unit(&ratio(-1, 2)));
        assert!(!is_unit(&ratio(5, 4)));
    }
}
