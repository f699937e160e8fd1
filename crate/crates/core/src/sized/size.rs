use std::fmt;

use serde::{Deserialize, Serialize};

/// A size: `î^k` (the variable `i` under `k` successors) or infinity.
///
/// Storing sizes as `(spine, offset)` makes the identification of the
/// successor of infinity with infinity definitional.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Size {
    Fin { var: String, offset: u64 },
    Inf,
}

impl Size {
    pub fn var(i: &str) -> Size {
        Size::Fin { var: i.to_string(), offset: 0 }
    }

    pub fn fin(i: &str, offset: u64) -> Size {
        Size::Fin { var: i.to_string(), offset }
    }

    pub fn succ(&self) -> Size {
        self.succ_n(1)
    }

    pub fn succ_n(&self, k: u64) -> Size {
        match self {
            Size::Fin { var, offset } => Size::Fin { var: var.clone(), offset: offset + k },
            Size::Inf => Size::Inf,
        }
    }

    /// Predecessor of a successor size; `None` for a bare variable.
    pub fn pred(&self) -> Option<Size> {
        match self {
            Size::Fin { offset: 0, .. } => None,
            Size::Fin { var, offset } => Some(Size::Fin { var: var.clone(), offset: offset - 1 }),
            Size::Inf => Some(Size::Inf),
        }
    }

    pub fn spine(&self) -> Option<&str> {
        match self {
            Size::Fin { var, .. } => Some(var),
            Size::Inf => None,
        }
    }

    pub fn offset(&self) -> Option<u64> {
        match self {
            Size::Fin { offset, .. } => Some(*offset),
            Size::Inf => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Size::Inf)
    }

    pub fn mentions(&self, i: &str) -> bool {
        self.spine() == Some(i)
    }

    /// `self ≼ other`: generated by `s ≼ ŝ`, `s ≼ ∞`, reflexivity and
    /// transitivity.
    pub fn leq(&self, other: &Size) -> bool {
        match (self, other) {
            (_, Size::Inf) => true,
            (Size::Inf, Size::Fin { .. }) => false,
            (Size::Fin { var: a, offset: k }, Size::Fin { var: b, offset: m }) => a == b && k <= m,
        }
    }

    /// `self[i := s]`.
    pub fn subst(&self, i: &str, s: &Size) -> Size {
        match self {
            Size::Fin { var, offset } if var == i => s.succ_n(*offset),
            _ => self.clone(),
        }
    }
}

pub fn size_leq(s: &Size, r: &Size) -> bool {
    s.leq(r)
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Inf => write!(f, "inf"),
            Size::Fin { var, offset: 0 } => write!(f, "{var}"),
            Size::Fin { var, offset } => write!(f, "{var}+{offset}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closure of the generating rules over offsets up to `bound`, used as
    /// an independent reference for `leq`.
    fn derivable(s: &Size, r: &Size, bound: u64) -> bool {
        let vars = ["i", "j"];
        let mut all: Vec<Size> = vec![Size::Inf];
        for v in vars {
            for k in 0..=bound {
                all.push(Size::fin(v, k));
            }
        }
        let idx = |x: &Size| all.iter().position(|y| y == x).unwrap();
        let n = all.len();
        let mut rel = vec![vec![false; n]; n];
        for a in 0..n {
            rel[a][a] = true;
            rel[a][idx(&Size::Inf)] = true;
            let succ = all[a].succ();
            if let Some(b) = all.iter().position(|y| *y == succ) {
                rel[a][b] = true;
            }
        }
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if rel[a][k] && rel[k][b] {
                        rel[a][b] = true;
                    }
                }
            }
        }
        rel[idx(s)][idx(r)]
    }

    #[test]
    fn order_examples() {
        assert!(size_leq(&Size::var("i"), &Size::fin("i", 1)));
        assert!(size_leq(&Size::fin("i", 3), &Size::Inf));
        assert!(!size_leq(&Size::fin("i", 1), &Size::fin("j", 1)));
        assert!(!size_leq(&Size::Inf, &Size::var("i")));
    }

    #[test]
    fn order_matches_rule_closure() {
        let mut sizes = vec![Size::Inf];
        for v in ["i", "j"] {
            for k in 0..=3 {
                sizes.push(Size::fin(v, k));
            }
        }
        for s in &sizes {
            for r in &sizes {
                assert_eq!(s.leq(r), derivable(s, r, 3), "{s} <= {r}");
            }
        }
    }

    #[test]
    fn substitution() {
        assert_eq!(Size::fin("i", 1).subst("i", &Size::fin("j", 1)), Size::fin("j", 2));
        assert_eq!(Size::fin("i", 1).subst("j", &Size::Inf), Size::fin("i", 1));
        assert_eq!(Size::fin("i", 4).subst("i", &Size::Inf), Size::Inf);
        assert_eq!(Size::Inf.succ(), Size::Inf);
    }

    #[test]
    fn display() {
        assert_eq!(Size::fin("i", 2).to_string(), "i+2");
        assert_eq!(Size::var("k").to_string(), "k");
        assert_eq!(Size::Inf.to_string(), "inf");
    }
}
