//! Call-by-value reduction on distributions, n-step approximations of the
//! semantics and a seeded Monte-Carlo sampler.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use thiserror::Error;

use crate::dist::{values_of, Distribution};
use crate::syntax::{subst_in_value, subst_value, Term, Value};
use crate::{Probability, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no reduction rule applies to `{0}`")]
    StuckTerm(String),
    #[error("`{0}` is a value and does not reduce")]
    IsValue(String),
}

/// One step of the reduction relation on a closed non-value term.
pub fn step_term(t: &Term) -> Result<Distribution<Term>, EvalError> {
    match redex(t)? {
        Step::Det(u) => Ok(Distribution::dirac(u)),
        Step::Split(m, p, n) => {
            let mut d = Distribution::empty();
            d.add_weighted(m, p.value().clone());
            d.add_weighted(n, p.complement());
            Ok(d)
        }
    }
}

#[allow(clippy::large_enum_variant)]
enum Step {
    Det(Term),
    Split(Term, Probability, Term),
}

fn redex(t: &Term) -> Result<Step, EvalError> {
    match t {
        Term::Val(_) => Err(EvalError::IsValue(t.to_string())),
        Term::Let(x, m, n) => match &**m {
            Term::Val(v) => Ok(Step::Det(subst_value(n, x, v))),
            _ => Ok(match redex(m)? {
                Step::Det(m2) => Step::Det(Term::Let(x.clone(), Box::new(m2), n.clone())),
                Step::Split(a, p, b) => Step::Split(
                    Term::Let(x.clone(), Box::new(a), n.clone()),
                    p,
                    Term::Let(x.clone(), Box::new(b), n.clone()),
                ),
            }),
        },
        Term::App(Value::Lam(x, _, body), w) => Ok(Step::Det(subst_value(body, x, w))),
        Term::App(rec @ Value::LetRec(f, _, body), arg @ (Value::Zero | Value::Succ(_))) => {
            let unfolded = subst_in_value(body, f, rec);
            Ok(Step::Det(Term::App(unfolded, arg.clone())))
        }
        Term::Choice(m, p, n) => {
            if m == n {
                Ok(Step::Det((**m).clone()))
            } else {
                Ok(Step::Split((**m).clone(), p.clone(), (**n).clone()))
            }
        }
        Term::Case(Value::Succ(v), w, _) => Ok(Step::Det(Term::App(w.clone(), (**v).clone()))),
        Term::Case(Value::Zero, _, z) => Ok(Step::Det(Term::Val(z.clone()))),
        _ => Err(EvalError::StuckTerm(t.to_string())),
    }
}

/// Keeps the values of `d` and steps every other support term once.
pub fn step_dist(d: &Distribution<Term>) -> Result<Distribution<Term>, EvalError> {
    let entries: Vec<(&Term, &Ratio)> = d.iter().collect();
    let stepped: Vec<Result<Distribution<Term>, EvalError>> = if entries.len() > 64 {
        entries
            .par_iter()
            .map(|(t, _)| if t.is_value() { Ok(Distribution::empty()) } else { step_term(t) })
            .collect()
    } else {
        entries
            .iter()
            .map(|(t, _)| if t.is_value() { Ok(Distribution::empty()) } else { step_term(t) })
            .collect()
    };
    let mut out = Distribution::empty();
    for ((t, p), next) in entries.into_iter().zip(stepped) {
        if t.is_value() {
            out.add_weighted(t.clone(), p.clone());
        } else {
            for (u, q) in next?.iter() {
                out.add_weighted(u.clone(), p * q);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub steps: u64,
    /// The value part after `steps` reductions.
    pub value_mass: Distribution<Value>,
    /// Mass still carried by non-values.
    pub residual: Ratio,
    /// Equal to the total of `value_mass`.
    pub termination_lower_bound: Ratio,
}

/// Iterates [`step_dist`] from a Dirac distribution.
#[derive(Debug, Clone)]
pub struct Evaluator {
    current: Distribution<Term>,
    steps: u64,
}

impl Evaluator {
    pub fn new(t: Term) -> Evaluator {
        Evaluator { current: Distribution::dirac(t), steps: 0 }
    }

    pub fn step(&mut self) -> Result<(), EvalError> {
        if !self.is_done() {
            self.current = step_dist(&self.current)?;
        }
        self.steps += 1;
        Ok(())
    }

    /// True once every support term is a value; further steps change nothing.
    pub fn is_done(&self) -> bool {
        self.current.support().all(Term::is_value)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn current(&self) -> &Distribution<Term> {
        &self.current
    }

    pub fn termination_lower_bound(&self) -> Ratio {
        self.current.iter().filter(|(t, _)| t.is_value()).map(|(_, p)| p.clone()).sum()
    }

    pub fn report(&self) -> EvalReport {
        let value_mass = values_of(&self.current);
        let bound = value_mass.sum();
        EvalReport {
            steps: self.steps,
            residual: self.current.sum() - &bound,
            termination_lower_bound: bound,
            value_mass,
        }
    }
}

pub fn eval_n(t: &Term, n: u64) -> Result<EvalReport, EvalError> {
    let mut ev = Evaluator::new(t.clone());
    while ev.steps() < n {
        if ev.is_done() {
            ev.steps = n;
            break;
        }
        ev.step()?;
    }
    Ok(ev.report())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Value(Value),
    Timeout,
}

/// `true` with probability `p` given a uniform 64-bit draw: `draw / 2^64 < p`.
fn take_left(draw: u64, p: &Probability) -> bool {
    let lhs = BigInt::from(draw) * p.value().denom();
    let rhs = p.value().numer() << 64;
    lhs < rhs
}

fn sample_step(t: &Term, rng: &mut SplitMix64) -> Result<Term, EvalError> {
    match redex(t)? {
        Step::Det(u) => Ok(u),
        Step::Split(m, p, n) => Ok(if take_left(rng.next_u64(), &p) { m } else { n }),
    }
}

/// One probabilistic run, resolving each choice with the generator seeded
/// by `seed`. Gives up after `max_steps` reductions.
pub fn sample(t: &Term, seed: u64, max_steps: u64) -> Result<Outcome, EvalError> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut cur = t.clone();
    for _ in 0..max_steps {
        if let Term::Val(v) = cur {
            return Ok(Outcome::Value(v));
        }
        cur = sample_step(&cur, &mut rng)?;
    }
    match cur {
        Term::Val(v) => Ok(Outcome::Value(v)),
        _ => Ok(Outcome::Timeout),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleReport {
    pub trials: u64,
    pub counts: BTreeMap<Value, u64>,
    pub timeouts: u64,
}

impl SampleReport {
    pub fn terminated(&self) -> u64 {
        self.trials - self.timeouts
    }
}

/// Runs `trials` independent samples in parallel. Trial `k` is seeded with
/// the `k`-th output of a SplitMix64 stream started at `seed`, so the
/// aggregate depends only on `(seed, trials)`.
pub fn sample_many(t: &Term, trials: u64, seed: u64, max_steps: u64) -> Result<SampleReport, EvalError> {
    let mut master = SplitMix64::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| master.next_u64()).collect();
    let outcomes: Result<Vec<Outcome>, EvalError> =
        seeds.par_iter().map(|s| sample(t, *s, max_steps)).collect();
    let mut counts = BTreeMap::new();
    let mut timeouts = 0;
    for o in outcomes? {
        match o {
            Outcome::Value(v) => *counts.entry(v).or_insert(0) += 1,
            Outcome::Timeout => timeouts += 1,
        }
    }
    Ok(SampleReport { trials, counts, timeouts })
}

/// Exact mass on each numeral in a value distribution; non-numerals are
/// skipped.
pub fn numeral_masses(d: &Distribution<Value>) -> BTreeMap<u64, Ratio> {
    d.iter()
        .filter_map(|(v, p)| crate::syntax::decode_nat(v).map(|n| (n, p.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};
    use crate::syntax::{encode_nat, parse};

    fn nat(n: u64) -> Term {
        Term::Val(encode_nat(n))
    }

    #[test]
    fn beta_on_identity() {
        let t = parse("(\\x. x) 0").unwrap();
        assert_eq!(step_term(&t).unwrap(), Distribution::dirac(nat(0)));
    }

    #[test]
    fn equal_branches_merge() {
        let t = parse("0 (+ 1/2) 0").unwrap();
        assert_eq!(step_term(&t).unwrap(), Distribution::dirac(nat(0)));
        assert_eq!(step_dist(&Distribution::dirac(t)).unwrap(), Distribution::dirac(nat(0)));
    }

    #[test]
    fn case_on_successor_applies_branch() {
        let t = parse("case 1 of { S -> w | 0 -> z }").unwrap();
        assert_eq!(
            step_term(&t).unwrap(),
            Distribution::dirac(Term::app(Value::var("w"), Value::Zero))
        );
        let t = parse("case 0 of { S -> w | 0 -> z }").unwrap();
        assert_eq!(step_term(&t).unwrap(), Distribution::dirac(Term::Val(Value::var("z"))));
    }

    #[test]
    fn values_are_fixed_and_mixtures_add() {
        let d = Distribution::dirac(nat(0));
        assert_eq!(step_dist(&d).unwrap(), d);
        let c = parse("0 (+ 1/2) 1").unwrap();
        let d = Distribution::from_entries([(c, ratio(1, 2)), (nat(0), ratio(1, 2))]).unwrap();
        let out = step_dist(&d).unwrap();
        assert_eq!(
            out,
            Distribution::from_entries([(nat(0), ratio(3, 4)), (nat(1), ratio(1, 4))]).unwrap()
        );
    }

    #[test]
    fn let_context_lifts_choice() {
        let t = parse("let x = 0 (+ 1/3) 1 in S x").unwrap();
        let d = step_term(&t).unwrap();
        assert_eq!(d.len(), 2);
        let two = step_dist(&d).unwrap();
        assert_eq!(two.get(&nat(1)), ratio(1, 3));
        assert_eq!(two.get(&nat(2)), ratio(2, 3));
    }

    #[test]
    fn stuck_terms_are_reported() {
        let t = parse("0 0").unwrap();
        assert!(matches!(step_term(&t), Err(EvalError::StuckTerm(_))));
        assert!(matches!(step_term(&nat(0)), Err(EvalError::IsValue(_))));
    }

    #[test]
    fn diverging_letrec_keeps_mass_on_non_values() {
        let t = parse("(letrec f = \\x. f x) 0").unwrap();
        let r = eval_n(&t, 100).unwrap();
        assert!(r.value_mass.is_empty());
        assert_eq!(r.residual, int(1));
        assert_eq!(sample(&t, 3, 100).unwrap(), Outcome::Timeout);
    }

    #[test]
    fn trivial_evaluation() {
        let r = eval_n(&nat(0), 0).unwrap();
        assert_eq!(r.value_mass, Distribution::dirac(Value::Zero));
        assert_eq!(r.residual, int(0));
        assert_eq!(r.termination_lower_bound, int(1));
    }

    #[test]
    fn threshold_draw_is_exact() {
        let half = Probability::half();
        assert!(take_left(0, &half));
        assert!(take_left((1u64 << 63) - 1, &half));
        assert!(!take_left(1u64 << 63, &half));
        assert!(!take_left(u64::MAX, &half));
    }

    #[test]
    fn sampler_is_deterministic_and_balanced() {
        let t = parse("0 (+ 1/2) 1").unwrap();
        assert_eq!(sample(&nat(0), 9, 10).unwrap(), Outcome::Value(Value::Zero));
        let a = sample_many(&t, 10_000, 42, 10).unwrap();
        let b = sample_many(&t, 10_000, 42, 10).unwrap();
        assert_eq!(a, b);
        let zeros = a.counts[&Value::Zero] as f64 / 10_000.0;
        assert!((zeros - 0.5).abs() <= 0.02, "{zeros}");
    }
}
