use std::collections::BTreeMap;

use mast_core::checker::{check_nat_bound, BoundError, SizeEnv};
use mast_core::dist::{values_of, Distribution};
use mast_core::ratio::ratio;
use mast_core::semantics::*;
use mast_core::simple::{check_simple, SimpleContext, SimpleType};
use mast_core::sized::{DistType, Size, SizedType};
use mast_core::syntax::{decode_nat, encode_nat, Term, Value};
use mast_core::{parse, Ratio};
use num_traits::{One, Zero};
use proptest::prelude::*;

mod common;
use common::arb_program;

fn corpus(name: &str) -> Term {
    let path = format!("{}/../../corpus/{name}.lop", env!("CARGO_MANIFEST_DIR"));
    parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pow2(k: u32) -> Ratio {
    Ratio::from_integer(num_bigint::BigInt::from(1u8) << k)
}

#[test]
fn geometric_distribution_is_exact() {
    let report = eval_n(&corpus("exp"), 200).unwrap();
    let masses = numeral_masses(&report.value_mass);
    for n in 0..=10u32 {
        assert_eq!(masses[&(n as u64)], Ratio::one() / pow2(n + 1), "n = {n}");
    }
}

#[test]
fn geometric_prefix_after_four_steps_per_unfolding() {
    let t = corpus("exp");
    for k in 1..=8u32 {
        let masses = numeral_masses(&eval_n(&t, 4 * k as u64 + 2).unwrap().value_mass);
        for n in 0..k {
            assert_eq!(masses[&(n as u64)], Ratio::one() / pow2(n + 1), "k = {k}, n = {n}");
        }
    }
}

#[test]
fn doubling_three_gives_six() {
    let report = eval_n(&corpus("dbl"), 1_000).unwrap();
    assert_eq!(report.value_mass, Distribution::dirac(encode_nat(6)));
    assert!(report.residual.is_zero());
}

#[test]
fn one_step_of_a_choice() {
    let t = parse("0 (+ 1/3) S 0").unwrap();
    let d = step_term(&t).unwrap();
    assert_eq!(d.get(&Term::Val(Value::Zero)), ratio(1, 3));
    assert_eq!(d.get(&Term::Val(encode_nat(1))), ratio(2, 3));
    assert!(matches!(step_term(&Term::Val(Value::Zero)), Err(EvalError::IsValue(_))));
    assert!(matches!(step_term(&parse("0 0").unwrap()), Err(EvalError::StuckTerm(_))));
}

#[test]
fn sampling_is_reproducible_and_mostly_terminates() {
    let t = corpus("bias");
    let a = sample_many(&t, 2_000, 7, 100_000).unwrap();
    let b = sample_many(&t, 2_000, 7, 100_000).unwrap();
    assert_eq!(a, b);
    assert!(a.terminated() * 100 >= a.trials * 99);
    assert!(a.counts.keys().all(|v| *v == Value::Zero));
}

#[test]
fn sampled_geometric_frequencies() {
    let r = sample_many(&corpus("exp"), 20_000, 11, 10_000).unwrap();
    let zero = r.counts.get(&Value::Zero).copied().unwrap_or(0) as f64 / r.trials as f64;
    // binomial standard deviation at 20k trials is about 0.0035
    assert!((zero - 0.5).abs() < 0.02, "{zero}");
}

fn env(s: u64) -> SizeEnv {
    [("s".to_string(), s)].into_iter().collect()
}

fn nat_s(k: u64) -> SizedType {
    SizedType::Nat(Size::fin("s", k))
}

#[test]
fn bound_examples() {
    let hat = DistType::dirac(nat_s(1));
    assert_eq!(check_nat_bound(&Term::Val(Value::Zero), &hat, 10, &env(0)), Ok(()));
    assert!(matches!(
        check_nat_bound(&Term::Val(encode_nat(1)), &hat, 10, &env(0)),
        Err(BoundError::BoundViolation { value: 1, .. })
    ));
    let inf = DistType::dirac(SizedType::nat_inf());
    assert_eq!(check_nat_bound(&corpus("exp"), &inf, 100, &SizeEnv::new()), Ok(()));
}

#[test]
fn bounds_need_a_transport_not_a_pointwise_match() {
    let t = parse("0 (+ 1/2) S 0").unwrap();
    let split = DistType::new([(nat_s(1), ratio(1, 2)), (nat_s(2), ratio(1, 2))]).unwrap();
    assert_eq!(check_nat_bound(&t, &split, 5, &env(0)), Ok(()));
    let tight = DistType::new([(nat_s(1), ratio(2, 3)), (nat_s(2), ratio(1, 3))]).unwrap();
    assert!(check_nat_bound(&t, &tight, 5, &env(0)).is_err());
    // the larger environment leaves room for both
    assert_eq!(check_nat_bound(&t, &tight, 5, &env(1)), Ok(()));
    let free = DistType::dirac(SizedType::Nat(Size::var("t")));
    assert!(matches!(check_nat_bound(&t, &free, 5, &env(0)), Err(BoundError::UnboundSize(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_programs_are_closed_and_nat_typed(t in arb_program()) {
        prop_assert!(t.is_closed());
        prop_assert_eq!(check_simple(&SimpleContext::new(), &t).unwrap(), SimpleType::Nat);
    }

    #[test]
    fn steps_conserve_mass(t in arb_program()) {
        let mut cur = Distribution::dirac(t);
        for _ in 0..30 {
            let next = step_dist(&cur).unwrap();
            prop_assert_eq!(next.sum(), cur.sum());
            cur = next;
        }
    }

    #[test]
    fn value_mass_grows_pointwise(t in arb_program()) {
        let mut cur = Distribution::dirac(t);
        let mut seen = values_of(&cur);
        for _ in 0..30 {
            cur = step_dist(&cur).unwrap();
            let now = values_of(&cur);
            prop_assert!(seen.leq(&now), "{} then {}", seen, now);
            seen = now;
        }
    }

    #[test]
    fn eval_n_matches_repeated_steps(t in arb_program(), n in 0u64..20) {
        let report = eval_n(&t, n).unwrap();
        let mut cur = Distribution::dirac(t);
        for _ in 0..n {
            cur = step_dist(&cur).unwrap();
        }
        prop_assert_eq!(&report.value_mass, &values_of(&cur));
        prop_assert_eq!(report.termination_lower_bound.clone() + report.residual, Ratio::one());
    }

    #[test]
    fn sampled_values_lie_in_the_support(t in arb_program(), seed in any::<u64>()) {
        let mut cur = Distribution::dirac(t.clone());
        for _ in 0..200 {
            cur = step_dist(&cur).unwrap();
        }
        if let Outcome::Value(v) = sample(&t, seed, 200).unwrap() {
            prop_assert!(!cur.get(&Term::Val(v.clone())).is_zero(), "{}", v);
        }
    }

    #[test]
    fn numeral_masses_cover_every_value(t in arb_program()) {
        let report = eval_n(&t, 50).unwrap();
        let masses: BTreeMap<u64, Ratio> = numeral_masses(&report.value_mass);
        let total: Ratio = masses.values().cloned().sum();
        prop_assert_eq!(total, report.termination_lower_bound);
        prop_assert!(report.value_mass.support().all(|v| decode_nat(v).is_some()));
    }
}
