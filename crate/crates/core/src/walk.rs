//! Sized walks: one-counter Markov chains on ℕ where 0 is absorbing and
//! from `s+1` the walk moves to `s+k` with probability `p_k`, or jumps to
//! 0 with the leftover probability `kill = 1 − Σ p_k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::ratio::parse_ratio;
use crate::sized::{DistType, Size, SizedType};
use crate::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("not a walk type: {0}")]
    NotAWalkType(String),
    #[error("invalid walk: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SizedWalk {
    increments: BTreeMap<u64, Ratio>,
}

impl SizedWalk {
    /// Merges repeated increments; rejects non-positive weights and totals
    /// above one.
    pub fn new<I: IntoIterator<Item = (u64, Ratio)>>(entries: I) -> Result<SizedWalk, WalkError> {
        let mut increments: BTreeMap<u64, Ratio> = BTreeMap::new();
        for (k, p) in entries {
            if p <= Ratio::zero() {
                return Err(WalkError::Invalid(format!("weight {p} on increment {k} is not positive")));
            }
            *increments.entry(k).or_insert_with(Ratio::zero) += p;
        }
        let w = SizedWalk { increments };
        if w.total() > Ratio::one() {
            return Err(WalkError::Invalid(format!("weights sum to {} > 1", w.total())));
        }
        Ok(w)
    }

    pub fn increments(&self) -> &BTreeMap<u64, Ratio> {
        &self.increments
    }

    fn total(&self) -> Ratio {
        self.increments.values().sum()
    }

    pub fn kill(&self) -> Ratio {
        Ratio::one() - self.total()
    }

    /// `Σ p_k (k − 1)`, the expected move of a step that is not a kill.
    pub fn drift(&self) -> Ratio {
        self.increments
            .iter()
            .map(|(k, p)| p * (Ratio::from_integer((*k).into()) - Ratio::one()))
            .sum()
    }

    pub fn is_ast(&self) -> bool {
        is_ast(self)
    }

    fn max_increment(&self) -> u64 {
        self.increments.keys().next_back().copied().unwrap_or(0)
    }

    /// Parses `walk{0:2/3, 2:1/3}`; the `walk` prefix is optional.
    pub fn parse(text: &str) -> Result<SizedWalk, WalkError> {
        let t = text.trim();
        let t = t.strip_prefix("walk").unwrap_or(t).trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| WalkError::Invalid(format!("expected `walk{{k:p, ...}}`, found `{text}`")))?;
        let mut entries = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, p) = part
                .split_once(':')
                .ok_or_else(|| WalkError::Invalid(format!("expected `k:p`, found `{part}`")))?;
            let k: u64 = k.trim().parse().map_err(|_| WalkError::Invalid(format!("bad increment `{k}`")))?;
            let p = parse_ratio(p).ok_or_else(|| WalkError::Invalid(format!("bad probability `{p}`")))?;
            entries.push((k, p));
        }
        SizedWalk::new(entries)
    }
}

impl fmt::Display for SizedWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "walk{{")?;
        for (n, (k, p)) in self.increments.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}:{p}")?;
        }
        write!(f, "}}")
    }
}

/// The walk induced by `{(Nat^{î^{k_j}} → ν_j)^{p_j}}`: increment `k_j`
/// receives weight `p_j`. All spines must be the same variable.
pub fn from_distribution_type(m: &DistType) -> Result<SizedWalk, WalkError> {
    let mut spine: Option<&str> = None;
    let mut entries = Vec::new();
    for (t, p) in m.iter() {
        let SizedType::Arrow(dom, _) = t else {
            return Err(WalkError::NotAWalkType(format!("`{t}` is not a function type")));
        };
        let SizedType::Nat(Size::Fin { var, offset }) = &**dom else {
            return Err(WalkError::NotAWalkType(format!("the domain of `{t}` has no spine variable")));
        };
        match spine {
            Some(i) if i != var => {
                return Err(WalkError::NotAWalkType(format!("spine variables {i} and {var} differ")));
            }
            _ => spine = Some(var),
        }
        entries.push((*offset, p.clone()));
    }
    SizedWalk::new(entries)
}

/// Almost-sure termination of a sized walk.
///
/// A positive kill probability absorbs every path eventually. Otherwise
/// the walk is skip-free downwards with bounded increments, so it reaches 0
/// almost surely iff its drift is negative, or zero with a non-degenerate
/// step distribution. The only zero-drift walk that never moves is
/// `walk{1:1}`, which stays at its start state forever.
pub fn is_ast(w: &SizedWalk) -> bool {
    if w.kill() > Ratio::zero() {
        return true;
    }
    let drift = w.drift();
    if drift < Ratio::zero() {
        return true;
    }
    drift.is_zero() && !(w.increments.len() == 1 && w.increments.contains_key(&1))
}

fn lcm_of_denominators(w: &SizedWalk) -> BigUint {
    let mut d = BigUint::one();
    for p in w.increments.values().chain(std::iter::once(&w.kill())) {
        d = d.lcm(&p.denom().to_biguint().expect("positive denominator"));
    }
    d
}

/// Highest state that can still reach 0 by time `horizon` after `t`
/// steps; states above it are dropped. With a positive kill probability
/// every state can, so nothing is dropped.
fn state_limit(w: &SizedWalk, horizon: u64, t: u64, start: u64) -> u64 {
    let reach = start + t * w.max_increment().saturating_sub(1);
    if w.kill().is_zero() {
        reach.min(horizon - t)
    } else {
        reach
    }
}

/// `Pr_t^(m)` for every `t ≤ n`, exactly.
pub fn horizon_table(w: &SizedWalk, n: u64, m: u64) -> Vec<Ratio> {
    if m == 0 {
        return vec![Ratio::one(); n as usize + 1];
    }
    let mut out = Vec::with_capacity(n as usize + 1);
    exact_forward(w, n, m, |_, num, scale| {
        out.push(Ratio::new(num.clone().into(), scale.clone().into()));
    });
    out
}

/// `Pr_n^(m)`: the probability of reaching 0 from `m` within `n` steps.
pub fn finite_horizon(w: &SizedWalk, n: u64, m: u64) -> Ratio {
    if m == 0 {
        return Ratio::one();
    }
    let mut last = Ratio::zero();
    exact_forward(w, n, m, |t, num, scale| {
        if t == n {
            last = Ratio::new(num.clone().into(), scale.clone().into());
        }
    });
    last
}

/// Propagates the state distribution forward with integer numerators over
/// the common denominator `D^t`, reporting the absorbed mass after each step.
fn exact_forward(w: &SizedWalk, n: u64, m: u64, mut report: impl FnMut(u64, &BigUint, &BigUint)) {
    let d = lcm_of_denominators(w);
    let scaled = |p: &Ratio| -> BigUint {
        (p * Ratio::from_integer(d.clone().into())).to_integer().to_biguint().expect("non-negative")
    };
    let incs: Vec<(u64, BigUint)> = w.increments.iter().map(|(k, p)| (*k, scaled(p))).collect();
    let kill = scaled(&w.kill());
    let mut scale = BigUint::one();
    let mut absorbed = BigUint::zero();
    let mut cur: Vec<BigUint> = vec![BigUint::zero(); m as usize + 1];
    cur[m as usize] = BigUint::one();
    report(0, &absorbed, &scale);
    let mut next: Vec<BigUint> = Vec::new();
    for t in 0..n {
        let limit = state_limit(w, n, t + 1, m) as usize;
        next.clear();
        next.resize(limit + 1, BigUint::zero());
        absorbed *= &d;
        scale *= &d;
        for (s, mass) in cur.iter().enumerate().skip(1) {
            if mass.is_zero() {
                continue;
            }
            if !kill.is_zero() {
                absorbed += &kill * mass;
            }
            for (k, a) in &incs {
                let target = s + *k as usize - 1;
                if target == 0 {
                    absorbed += a * mass;
                } else if target <= limit {
                    next[target] += a * mass;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        report(t + 1, &absorbed, &scale);
    }
}

/// Floating-point `Pr_t^(m)` for `t ≤ n`, stopping early once `stop`
/// returns true. Also returns a bound on the accumulated rounding error.
pub fn horizon_f64(w: &SizedWalk, n: u64, m: u64, mut stop: impl FnMut(u64, f64) -> bool) -> (Vec<f64>, f64) {
    let incs: Vec<(usize, f64)> = w
        .increments
        .iter()
        .map(|(k, p)| (*k as usize, p.to_f64().expect("finite")))
        .collect();
    let kill = w.kill().to_f64().expect("finite");
    // Each step is a substochastic map computed with at most `len + 2`
    // roundings per unit of mass; errors do not grow in L1 under such maps.
    let per_step = (incs.len() as f64 + 3.0) * 4.0 * f64::EPSILON;
    let mut out = vec![if m == 0 { 1.0 } else { 0.0 }];
    if m == 0 {
        return (vec![1.0; n as usize + 1], 0.0);
    }
    let mut cur = vec![0.0f64; m as usize + 1];
    cur[m as usize] = 1.0;
    let mut next: Vec<f64> = Vec::new();
    let mut absorbed = 0.0f64;
    for t in 0..n {
        let limit = state_limit(w, n, t + 1, m) as usize;
        next.clear();
        next.resize(limit + 1, 0.0);
        for (s, &mass) in cur.iter().enumerate().skip(1) {
            if mass == 0.0 {
                continue;
            }
            absorbed += kill * mass;
            for &(k, a) in &incs {
                let target = s + k - 1;
                if target == 0 {
                    absorbed += a * mass;
                } else if target <= limit {
                    next[target] += a * mass;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        out.push(absorbed.min(1.0));
        if stop(t + 1, absorbed) {
            break;
        }
    }
    let err = per_step * (out.len() as f64);
    (out, err)
}

#[derive(Debug, Clone, PartialEq)]
pub enum HorizonSearch {
    /// `Pr_n^(m) ≥ 1 − ε`, confirmed exactly.
    Found { n: u64, probability: Ratio },
    /// No `n ≤ n_max` qualifies: the float bound plus its rounding error
    /// stays below `1 − ε` at `n_max`, and `Pr_n^(m)` is nondecreasing in `n`.
    NotFound { n_max: u64, upper_bound: f64 },
}

/// Looks for `n ≤ n_max` with `Pr_n^(m) ≥ 1 − ε`. A float pass locates the
/// first candidate, which is then confirmed in exact arithmetic.
pub fn search_horizon(w: &SizedWalk, m: u64, eps: &Ratio, n_max: u64) -> HorizonSearch {
    let target = Ratio::one() - eps;
    let target_f = target.to_f64().expect("finite");
    let (probe, err) = horizon_f64(w, n_max, m, |_, p| p >= target_f + 1e-6);
    let start = probe.iter().position(|p| *p + err >= target_f);
    let Some(start) = start else {
        return HorizonSearch::NotFound { n_max, upper_bound: probe.last().copied().unwrap_or(0.0) + err };
    };
    let mut n = start as u64;
    loop {
        let p = finite_horizon(w, n, m);
        if p >= target {
            return HorizonSearch::Found { n, probability: p };
        }
        // only reachable inside the rounding band; step past it
        n += 1;
        if n > n_max {
            let upper = probe.last().copied().unwrap_or(0.0) + err;
            return HorizonSearch::NotFound { n_max, upper_bound: upper };
        }
    }
}

/// Rigorous bounds on the probability of reaching 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingBounds {
    pub lower: Ratio,
    pub upper: Ratio,
}

impl HittingBounds {
    pub fn width(&self) -> Ratio {
        &self.upper - &self.lower
    }
}

/// Hitting probability of 0 from state 1; see [`hitting_probability_from`].
pub fn hitting_probability(w: &SizedWalk, tol: &Ratio) -> HittingBounds {
    hitting_probability_from(w, tol, 1)
}

/// Bounds on the probability of eventually reaching 0 from `m`.
///
/// Let `u` be the probability of descending one level through ordinary
/// moves, before any kill. Skip-freeness makes descents from `s+k` to `s`
/// a sequence of `k` independent one-level descents, so `u` is the least
/// root in `[0,1]` of `Σ p_k u^k = u`. Let `v` be the probability of being
/// killed before descending one level: `v = kill + Σ p_k S_k(u) v` with
/// `S_k(u) = Σ_{j<k} u^j`. From `m` the walk reaches 0 either by `m`
/// descents or by a kill after `j < m` of them, giving
/// `h_m = u^m + v S_m(u)`. The root is bracketed by exact bisection and
/// `h_m` is increasing in `u`, so evaluating at both ends bounds it.
pub fn hitting_probability_from(w: &SizedWalk, tol: &Ratio, m: u64) -> HittingBounds {
    if m == 0 {
        return HittingBounds { lower: Ratio::one(), upper: Ratio::one() };
    }
    let phi = |u: &Ratio| -> Ratio {
        let mut acc = -u.clone();
        for (k, p) in &w.increments {
            acc += p * pow(u, *k);
        }
        acc
    };
    let (mut lo, mut hi) = (Ratio::zero(), Ratio::one());
    if phi(&lo).is_zero() {
        hi = lo.clone();
    }
    let width = tol / Ratio::from_integer(64.into());
    let two = Ratio::from_integer(2.into());
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        if phi(&mid) > Ratio::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eval = |u: &Ratio| -> Option<Ratio> {
        let c: Ratio = w.increments.iter().map(|(k, p)| p * geometric(u, *k)).sum();
        let kill = w.kill();
        let v = if kill.is_zero() {
            Ratio::zero()
        } else if c < Ratio::one() {
            kill / (Ratio::one() - c)
        } else {
            return None;
        };
        Some((pow(u, m) + v * geometric(u, m)).min(Ratio::one()))
    };
    let lower = eval(&lo).unwrap_or_else(Ratio::zero);
    let upper = eval(&hi).unwrap_or_else(Ratio::one);
    HittingBounds { lower, upper }
}

fn pow(u: &Ratio, k: u64) -> Ratio {
    let mut acc = Ratio::one();
    for _ in 0..k {
        acc *= u;
    }
    acc
}

/// `Σ_{j<k} u^j`.
fn geometric(u: &Ratio, k: u64) -> Ratio {
    let mut acc = Ratio::zero();
    let mut term = Ratio::one();
    for _ in 0..k {
        acc += &term;
        term *= u;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};
    use crate::sized::DistType;

    fn walk(entries: &[(u64, (i64, i64))]) -> SizedWalk {
        SizedWalk::new(entries.iter().map(|(k, (a, b))| (*k, ratio(*a, *b)))).unwrap()
    }

    fn arrow(k: u64) -> SizedType {
        SizedType::arrow(SizedType::Nat(Size::fin("i", k)), DistType::dirac(SizedType::nat_inf()))
    }

    #[test]
    fn walks_from_types() {
        let mu = DistType::new(vec![(arrow(0), ratio(1, 2)), (arrow(2), ratio(1, 3))]).unwrap();
        let w = from_distribution_type(&mu).unwrap();
        assert_eq!(w, walk(&[(0, (1, 2)), (2, (1, 3))]));
        assert_eq!(w.kill(), ratio(1, 6));
        let mu = DistType::new(vec![(arrow(0), ratio(2, 3)), (arrow(2), ratio(1, 3))]).unwrap();
        let w = from_distribution_type(&mu).unwrap();
        assert_eq!(w.kill(), int(0));
        let inf = DistType::dirac(SizedType::arrow(SizedType::nat_inf(), DistType::dirac(SizedType::nat_inf())));
        assert!(matches!(from_distribution_type(&inf), Err(WalkError::NotAWalkType(_))));
        let mixed = DistType::new(vec![
            (arrow(0), ratio(1, 2)),
            (SizedType::arrow(SizedType::Nat(Size::var("j")), DistType::dirac(SizedType::nat_inf())), ratio(1, 2)),
        ])
        .unwrap();
        assert!(from_distribution_type(&mixed).is_err());
    }

    #[test]
    fn decisions() {
        let biased = walk(&[(0, (2, 3)), (2, (1, 3))]);
        assert_eq!(biased.drift(), ratio(-1, 3));
        assert!(is_ast(&biased));
        let unbiased = walk(&[(0, (1, 2)), (2, (1, 2))]);
        assert_eq!(unbiased.drift(), int(0));
        assert!(is_ast(&unbiased));
        let up = walk(&[(2, (2, 3)), (0, (1, 3))]);
        assert!(!is_ast(&up));
        assert!(is_ast(&walk(&[(0, (1, 2)), (2, (1, 3))])));
        assert!(!is_ast(&walk(&[(1, (1, 1))])));
        assert!(is_ast(&walk(&[(1, (1, 2))])));
        assert!(is_ast(&SizedWalk::new(vec![]).unwrap()));
    }

    #[test]
    fn parse_and_display() {
        let w = SizedWalk::parse("walk{0:2/3, 2:1/3}").unwrap();
        assert_eq!(w.to_string(), "walk{0:2/3, 2:1/3}");
        assert!(SizedWalk::parse("walk{0:2/3, 2:2/3}").is_err());
        assert!(SizedWalk::parse("{0:x}").is_err());
        assert_eq!(SizedWalk::parse("walk{}").unwrap().kill(), int(1));
    }

    /// Reference implementation: the recurrence over `(n, m)` with memo.
    fn recurrence(w: &SizedWalk, n: u64, m: u64, memo: &mut BTreeMap<(u64, u64), Ratio>) -> Ratio {
        if m == 0 {
            return int(1);
        }
        if n == 0 {
            return int(0);
        }
        if let Some(r) = memo.get(&(n, m)) {
            return r.clone();
        }
        let mut acc = w.kill();
        for (k, p) in w.increments() {
            acc += p * recurrence(w, n - 1, m - 1 + k, memo);
        }
        memo.insert((n, m), acc.clone());
        acc
    }

    #[test]
    fn finite_horizon_matches_recurrence() {
        for w in [
            walk(&[(0, (2, 3)), (2, (1, 3))]),
            walk(&[(0, (1, 2)), (2, (1, 3))]),
            walk(&[(0, (1, 4)), (1, (1, 4)), (3, (1, 4))]),
            walk(&[(1, (1, 2))]),
        ] {
            let mut memo = BTreeMap::new();
            for m in 0..4 {
                let table = horizon_table(&w, 12, m);
                for n in 0..=12 {
                    assert_eq!(table[n as usize], recurrence(&w, n, m, &mut memo), "{w} n={n} m={m}");
                }
                assert_eq!(finite_horizon(&w, 12, m), table[12]);
            }
        }
    }

    #[test]
    fn finite_horizon_examples() {
        let biased = walk(&[(0, (2, 3)), (2, (1, 3))]);
        assert_eq!(finite_horizon(&biased, 7, 0), int(1));
        assert_eq!(finite_horizon(&biased, 1, 1), ratio(2, 3));
        let table = horizon_table(&biased, 200, 1);
        assert!(table.windows(2).all(|p| p[0] <= p[1]));
        assert!(table.iter().any(|p| *p > ratio(99, 100)));
    }

    #[test]
    fn float_pass_tracks_exact_values() {
        let w = walk(&[(0, (1, 2)), (2, (1, 2))]);
        let exact = horizon_table(&w, 60, 3);
        let (approx, err) = horizon_f64(&w, 60, 3, |_, _| false);
        assert!(err < 1e-12);
        for (e, a) in exact.iter().zip(&approx) {
            assert!((e.to_f64().unwrap() - a).abs() <= err);
        }
    }

    #[test]
    fn horizon_search() {
        let biased = walk(&[(0, (2, 3)), (2, (1, 3))]);
        match search_horizon(&biased, 1, &ratio(1, 100), 1000) {
            HorizonSearch::Found { n, probability } => {
                assert!(probability >= ratio(99, 100));
                assert!(finite_horizon(&biased, n - 1, 1) < ratio(99, 100));
            }
            other => panic!("{other:?}"),
        }
        let up = walk(&[(2, (2, 3)), (0, (1, 3))]);
        assert!(matches!(search_horizon(&up, 1, &ratio(1, 10), 500), HorizonSearch::NotFound { .. }));
    }

    #[test]
    fn oracle_examples() {
        let tol = ratio(1, 1_000_000_000);
        let dead = SizedWalk::new(vec![]).unwrap();
        let h = hitting_probability(&dead, &tol);
        assert_eq!((h.lower, h.upper), (int(1), int(1)));
        let up = walk(&[(2, (2, 3)), (0, (1, 3))]);
        let h = hitting_probability(&up, &tol);
        assert!(h.lower <= ratio(1, 2) && ratio(1, 2) <= h.upper);
        assert!(h.width() <= tol);
        let critical = walk(&[(0, (1, 2)), (2, (1, 2))]);
        let h = hitting_probability(&critical, &tol);
        assert!(h.lower >= int(1) - &tol);
        let stuck = walk(&[(1, (1, 1))]);
        assert_eq!(hitting_probability(&stuck, &tol).upper, int(0));
    }

    #[test]
    fn oracle_handles_kill_jumps() {
        // a kill jump from a high state lands on 0 directly, so a positive
        // kill probability gives hitting probability 1 even with upward drift
        let w = walk(&[(3, (7, 8))]);
        let tol = ratio(1, 1_000_000);
        let h = hitting_probability_from(&w, &tol, 2);
        assert!(h.lower >= int(1) - ratio(1, 1000), "{h:?}");
        let table = horizon_table(&w, 200, 2);
        assert!(table[200] > ratio(999, 1000));
    }
}
