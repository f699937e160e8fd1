use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::size::Size;
use super::TypeError;
use crate::simple::SimpleType;
use crate::Ratio;

/// Entries beyond this count on either side of a distribution subtyping
/// query are refused rather than searched.
pub const SUBTYPE_BUDGET: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizedType {
    Nat(Size),
    Arrow(Box<SizedType>, DistType),
}

/// A finite non-empty distribution over sized types sharing one underlying
/// simple type, with total weight at most one. Equal sized types are merged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DistType(BTreeMap<SizedType, Ratio>);

impl SizedType {
    pub fn nat(s: Size) -> SizedType {
        SizedType::Nat(s)
    }

    pub fn nat_inf() -> SizedType {
        SizedType::Nat(Size::Inf)
    }

    pub fn arrow(dom: SizedType, cod: DistType) -> SizedType {
        SizedType::Arrow(Box::new(dom), cod)
    }

    pub fn underlying(&self) -> SimpleType {
        match self {
            SizedType::Nat(_) => SimpleType::Nat,
            SizedType::Arrow(a, mu) => SimpleType::arrow(a.underlying(), mu.underlying()),
        }
    }

    pub fn subst(&self, i: &str, s: &Size) -> SizedType {
        match self {
            SizedType::Nat(r) => SizedType::Nat(r.subst(i, s)),
            SizedType::Arrow(a, mu) => SizedType::arrow(a.subst(i, s), mu.subst(i, s)),
        }
    }

    /// Size variables occurring anywhere in the type.
    pub fn size_vars(&self, out: &mut Vec<String>) {
        match self {
            SizedType::Nat(s) => {
                if let Some(v) = s.spine() {
                    if !out.iter().any(|x| x == v) {
                        out.push(v.to_string());
                    }
                }
            }
            SizedType::Arrow(a, mu) => {
                a.size_vars(out);
                for t in mu.0.keys() {
                    t.size_vars(out);
                }
            }
        }
    }

    /// Sized type with every size replaced by infinity: the canonical
    /// refinement of a simple type.
    pub fn from_simple(k: &SimpleType) -> SizedType {
        match k {
            SimpleType::Nat => SizedType::nat_inf(),
            SimpleType::Arrow(a, b) => {
                SizedType::arrow(SizedType::from_simple(a), DistType::dirac(SizedType::from_simple(b)))
            }
        }
    }
}

impl DistType {
    pub fn new<I>(entries: I) -> Result<DistType, TypeError>
    where
        I: IntoIterator<Item = (SizedType, Ratio)>,
    {
        let mut map: BTreeMap<SizedType, Ratio> = BTreeMap::new();
        for (t, p) in entries {
            if p <= Ratio::zero() {
                return Err(TypeError::InvalidDistType(format!("non-positive weight {p} on {t}")));
            }
            *map.entry(t).or_insert_with(Ratio::zero) += p;
        }
        if map.is_empty() {
            return Err(TypeError::InvalidDistType("empty distribution type".into()));
        }
        let total: Ratio = map.values().sum();
        if total > Ratio::one() {
            return Err(TypeError::InvalidDistType(format!("total weight {total} exceeds 1")));
        }
        let mut kinds = map.keys().map(SizedType::underlying);
        let first = kinds.next().expect("non-empty");
        if kinds.any(|k| k != first) {
            return Err(TypeError::UnderlyingMismatch);
        }
        Ok(DistType(map))
    }

    pub fn dirac(t: SizedType) -> DistType {
        DistType(BTreeMap::from([(t, Ratio::one())]))
    }

    pub fn entries(&self) -> &BTreeMap<SizedType, Ratio> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SizedType, &Ratio)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Ratio {
        self.0.values().sum()
    }

    pub fn is_proper(&self) -> bool {
        self.total().is_one()
    }

    /// The single sized type of a Dirac distribution `{σ^1}`.
    pub fn as_dirac(&self) -> Option<&SizedType> {
        match self.0.iter().next() {
            Some((t, p)) if self.0.len() == 1 && p.is_one() => Some(t),
            _ => None,
        }
    }

    pub fn underlying(&self) -> SimpleType {
        self.0.keys().next().expect("distribution types are non-empty").underlying()
    }

    pub fn subst(&self, i: &str, s: &Size) -> DistType {
        let mut map: BTreeMap<SizedType, Ratio> = BTreeMap::new();
        for (t, p) in &self.0 {
            *map.entry(t.subst(i, s)).or_insert_with(Ratio::zero) += p;
        }
        DistType(map)
    }

    /// `a · μ` for `0 < a ≤ 1`.
    pub fn scale(&self, a: &Ratio) -> Result<DistType, TypeError> {
        DistType::new(self.0.iter().map(|(t, p)| (t.clone(), p * a)))
    }

    /// `Σ a_k · μ_k`; fails when the family is empty, the underlying types
    /// differ or the total exceeds one.
    pub fn mix<'a, I>(parts: I) -> Result<DistType, TypeError>
    where
        I: IntoIterator<Item = (&'a Ratio, &'a DistType)>,
    {
        let mut entries = Vec::new();
        for (a, mu) in parts {
            for (t, p) in &mu.0 {
                entries.push((t.clone(), a * p));
            }
        }
        DistType::new(entries)
    }
}

/// `σ ⊑ τ`.
pub fn subtype(a: &SizedType, b: &SizedType) -> Result<bool, TypeError> {
    match (a, b) {
        (SizedType::Nat(s), SizedType::Nat(r)) => Ok(s.leq(r)),
        (SizedType::Arrow(s1, m1), SizedType::Arrow(s2, m2)) => {
            Ok(subtype(s2, s1)? && subtype_dist(m1, m2)?)
        }
        _ => Ok(false),
    }
}

/// `μ ⊑ ν` on distribution types.
///
/// Entries of `μ` may be transported fractionally onto `⊑`-greater entries
/// of `ν` without exceeding their weights. Because equal sized types are
/// merged, a mass that the multiset presentation would keep as two copies
/// needs to be split; by Hall's theorem the transport exists iff every set
/// `S` of source entries satisfies `Σ_S p ≤ Σ_{N(S)} q`, where `N(S)` are the
/// targets reachable from `S`.
pub fn subtype_dist(m: &DistType, n: &DistType) -> Result<bool, TypeError> {
    if m.len() > SUBTYPE_BUDGET || n.len() > SUBTYPE_BUDGET {
        return Err(TypeError::SearchBudgetExceeded { left: m.len(), right: n.len() });
    }
    if m.underlying() != n.underlying() {
        return Ok(false);
    }
    let sources: Vec<(&SizedType, &Ratio)> = m.iter().collect();
    let targets: Vec<(&SizedType, &Ratio)> = n.iter().collect();
    let mut reach = vec![0u32; sources.len()];
    for (a, (s, _)) in sources.iter().enumerate() {
        for (b, (t, _)) in targets.iter().enumerate() {
            if subtype(s, t)? {
                reach[a] |= 1 << b;
            }
        }
        if reach[a] == 0 {
            return Ok(false);
        }
    }
    for subset in 1u32..(1 << sources.len()) {
        let mut need = Ratio::zero();
        let mut nbhd = 0u32;
        for (a, (_, p)) in sources.iter().enumerate() {
            if subset & (1 << a) != 0 {
                need += *p;
                nbhd |= reach[a];
            }
        }
        let have: Ratio = targets
            .iter()
            .enumerate()
            .filter(|(b, _)| nbhd & (1 << b) != 0)
            .map(|(_, (_, q))| (*q).clone())
            .sum();
        if need > have {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    Negative,
    Both,
    Neither,
}

impl Positivity {
    pub fn is_positive(self) -> bool {
        matches!(self, Positivity::Positive | Positivity::Both)
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Positivity::Negative | Positivity::Both)
    }
}

fn pos_neg(i: &str, t: &SizedType) -> (bool, bool) {
    match t {
        SizedType::Nat(s) => (true, !s.mentions(i)),
        SizedType::Arrow(a, mu) => {
            let (ap, an) = pos_neg(i, a);
            let (mp, mn) = pos_neg_dist(i, mu);
            (an && mp, ap && mn)
        }
    }
}

fn pos_neg_dist(i: &str, mu: &DistType) -> (bool, bool) {
    mu.0.keys().fold((true, true), |(p, n), t| {
        let (tp, tn) = pos_neg(i, t);
        (p && tp, n && tn)
    })
}

fn classify((p, n): (bool, bool)) -> Positivity {
    match (p, n) {
        (true, true) => Positivity::Both,
        (true, false) => Positivity::Positive,
        (false, true) => Positivity::Negative,
        (false, false) => Positivity::Neither,
    }
}

pub fn positivity(i: &str, t: &SizedType) -> Positivity {
    classify(pos_neg(i, t))
}

pub fn positivity_dist(i: &str, mu: &DistType) -> Positivity {
    classify(pos_neg_dist(i, mu))
}

impl fmt::Display for SizedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizedType::Nat(s) => write!(f, "Nat[{s}]"),
            SizedType::Arrow(a, mu) => {
                match **a {
                    SizedType::Arrow(..) => write!(f, "({a})")?,
                    SizedType::Nat(_) => write!(f, "{a}")?,
                }
                write!(f, " -> {mu}")
            }
        }
    }
}

impl fmt::Display for DistType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = self.as_dirac() {
            return write!(f, "{t}");
        }
        write!(f, "{{")?;
        for (k, (t, p)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            match t {
                SizedType::Arrow(..) => write!(f, "({t}) ^ {p}")?,
                SizedType::Nat(_) => write!(f, "{t} ^ {p}")?,
            }
        }
        write!(f, "}}")
    }
}
