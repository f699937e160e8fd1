//! Generators shared by the property suites.
#![allow(dead_code)]

pub mod traces;

use mast_core::ratio::ratio;
use mast_core::sized::{DistType, Size, SizedType};
use mast_core::syntax::{encode_nat, Term, Value};
use mast_core::{parse, Probability, Ratio};
use proptest::prelude::*;

/// Random closed programs of type Nat; `scope` lists the Nat variables in
/// scope.
fn arb_nat_value(scope: Vec<String>) -> BoxedStrategy<Value> {
    let numeral = (0u64..4).prop_map(encode_nat);
    if scope.is_empty() {
        return numeral.boxed();
    }
    let var = prop::sample::select(scope).prop_map(Value::Var);
    prop_oneof![numeral, var.clone(), var.prop_map(Value::succ)].boxed()
}

pub fn arb_nat_term(depth: u32, scope: Vec<String>) -> BoxedStrategy<Term> {
    let leaf = arb_nat_value(scope.clone()).prop_map(Term::Val);
    if depth == 0 {
        return leaf.boxed();
    }
    let x = format!("x{depth}");
    let mut inner = scope.clone();
    inner.push(x.clone());
    let sub = arb_nat_term(depth - 1, scope.clone());
    let body = arb_nat_term(depth - 1, inner);
    let prob = (1i64..8, 2i64..9).prop_map(|(a, b)| Probability::new(ratio(a.min(b - 1), b)).unwrap());
    let (x1, x2, x3) = (x.clone(), x.clone(), x);
    prop_oneof![
        leaf,
        (sub.clone(), prob, sub.clone()).prop_map(|(m, p, n)| Term::Choice(Box::new(m), p, Box::new(n))),
        (sub.clone(), body.clone()).prop_map(move |(m, n)| Term::Let(x1.clone(), Box::new(m), Box::new(n))),
        (body.clone(), arb_nat_value(scope.clone()))
            .prop_map(move |(b, v)| Term::App(Value::Lam(x2.clone(), None, Box::new(b)), v)),
        (arb_nat_value(scope.clone()), body, arb_nat_value(scope.clone()))
            .prop_map(move |(v, b, z)| Term::Case(v, Value::Lam(x3.clone(), None, Box::new(b)), z)),
        (0u64..5).prop_map(|n| {
            let countdown = "letrec f = \\x. case x of { S -> \\y. f y (+ 1/2) f y | 0 -> 0 }";
            Term::App(parse_value(countdown), encode_nat(n))
        }),
    ]
    .boxed()
}

fn parse_value(src: &str) -> Value {
    match parse(src).unwrap() {
        Term::Val(v) => v,
        other => panic!("not a value: {other}"),
    }
}

pub fn arb_program() -> BoxedStrategy<Term> {
    arb_nat_term(3, Vec::new())
}

/// Sizes over the spines `i` and `j`, plus infinity.
pub fn arb_size() -> BoxedStrategy<Size> {
    prop_oneof![
        Just(Size::Inf),
        (0u64..3).prop_map(|k| Size::fin("i", k)),
        (0u64..3).prop_map(|k| Size::fin("j", k)),
    ]
    .boxed()
}

/// Sizes that do not mention `i`, for substituting into it.
pub fn arb_size_without_i() -> BoxedStrategy<Size> {
    prop_oneof![Just(Size::Inf), (0u64..3).prop_map(|k| Size::fin("j", k))].boxed()
}

#[derive(Debug, Clone, Copy)]
pub enum Shape {
    Nat,
    Arrow(&'static Shape, &'static Shape),
}

pub const SHAPES: [Shape; 4] = [
    Shape::Nat,
    Shape::Arrow(&Shape::Nat, &Shape::Nat),
    Shape::Arrow(&Shape::Arrow(&Shape::Nat, &Shape::Nat), &Shape::Nat),
    Shape::Arrow(&Shape::Nat, &Shape::Arrow(&Shape::Nat, &Shape::Nat)),
];

pub fn arb_shape() -> impl Strategy<Value = Shape> {
    prop::sample::select(SHAPES.to_vec())
}

pub fn arb_typed(shape: Shape) -> BoxedStrategy<SizedType> {
    match shape {
        Shape::Nat => arb_size().prop_map(SizedType::Nat).boxed(),
        Shape::Arrow(a, b) => {
            (arb_typed(*a), arb_dist(*b)).prop_map(|(a, mu)| SizedType::arrow(a, mu)).boxed()
        }
    }
}

/// A proper distribution type with one to three entries of the given shape.
pub fn arb_dist(shape: Shape) -> BoxedStrategy<DistType> {
    prop::collection::vec((arb_typed(shape), 1i64..4), 1..=3)
        .prop_map(|entries| {
            let total: i64 = entries.iter().map(|(_, w)| w).sum();
            DistType::new(entries.into_iter().map(|(t, w)| (t, ratio(w, total)))).unwrap()
        })
        .boxed()
}

pub fn arb_type() -> BoxedStrategy<SizedType> {
    arb_shape().prop_flat_map(arb_typed).boxed()
}

/// Three types of one shape.
pub fn arb_type_triple() -> BoxedStrategy<(SizedType, SizedType, SizedType)> {
    arb_shape().prop_flat_map(|s| (arb_typed(s), arb_typed(s), arb_typed(s))).boxed()
}

fn bigger(s: &Size, pick: u8) -> Size {
    match (s, pick % 3) {
        (_, 0) => s.clone(),
        (Size::Fin { .. }, 1) => s.succ(),
        _ => Size::Inf,
    }
}

fn smaller(s: &Size, pick: u8) -> Size {
    match s {
        Size::Fin { var, offset } => Size::fin(var, offset.saturating_sub((pick % 2) as u64)),
        Size::Inf => [Size::Inf, Size::fin("i", 0), Size::fin("j", 1)][(pick % 3) as usize].clone(),
    }
}

/// A supertype of `t` built by raising sizes in covariant positions and
/// lowering them in contravariant ones; `picks` drives the choices.
pub fn widen(t: &SizedType, picks: &mut impl Iterator<Item = u8>, up: bool) -> SizedType {
    match t {
        SizedType::Nat(s) => {
            let p = picks.next().unwrap_or(0);
            SizedType::Nat(if up { bigger(s, p) } else { smaller(s, p) })
        }
        SizedType::Arrow(a, mu) => SizedType::arrow(widen(a, picks, !up), widen_dist(mu, picks, up)),
    }
}

pub fn widen_dist(mu: &DistType, picks: &mut impl Iterator<Item = u8>, up: bool) -> DistType {
    let entries: Vec<(SizedType, Ratio)> = mu.iter().map(|(t, p)| (widen(t, picks, up), p.clone())).collect();
    DistType::new(entries).unwrap()
}
