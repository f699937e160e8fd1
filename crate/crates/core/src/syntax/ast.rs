use std::collections::BTreeSet;

use crate::sized::{DistType, Size, SizedType};

pub type Name = String;

/// Annotation carried by a `letrec` binder: the spine variable `i`, the
/// result type `nu` (in which `i` must occur positively) and optionally the
/// distribution over argument sizes of the recursive calls.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LetRecAnnot {
    pub var: String,
    pub nu: DistType,
    pub family: Option<Vec<(Size, crate::Ratio)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Var(Name),
    Zero,
    Succ(Box<Value>),
    Lam(Name, Option<SizedType>, Box<Term>),
    LetRec(Name, Option<LetRecAnnot>, Box<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Val(Value),
    App(Value, Value),
    Let(Name, Box<Term>, Box<Term>),
    Choice(Box<Term>, crate::Probability, Box<Term>),
    /// `case v of { S -> w | 0 -> z }`
    Case(Value, Value, Value),
}

impl Value {
    pub fn var(name: &str) -> Value {
        Value::Var(name.to_string())
    }

    pub fn succ(v: Value) -> Value {
        Value::Succ(Box::new(v))
    }

    pub fn lam(x: &str, body: Term) -> Value {
        Value::Lam(x.to_string(), None, Box::new(body))
    }

    pub fn letrec(f: &str, body: Value) -> Value {
        Value::LetRec(f.to_string(), None, Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Value::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Value::Zero => {}
            Value::Succ(v) => v.collect_free(bound, out),
            Value::Lam(x, _, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Value::LetRec(f, _, body) => {
                bound.push(f.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Drops every type annotation, keeping the term structure.
    pub fn erase(&self) -> Value {
        match self {
            Value::Var(_) | Value::Zero => self.clone(),
            Value::Succ(v) => Value::succ(v.erase()),
            Value::Lam(x, _, body) => Value::Lam(x.clone(), None, Box::new(body.erase())),
            Value::LetRec(f, _, body) => Value::LetRec(f.clone(), None, Box::new(body.erase())),
        }
    }
}

impl Term {
    pub fn val(v: Value) -> Term {
        Term::Val(v)
    }

    pub fn app(f: Value, a: Value) -> Term {
        Term::App(f, a)
    }

    pub fn let_in(x: &str, m: Term, n: Term) -> Term {
        Term::Let(x.to_string(), Box::new(m), Box::new(n))
    }

    pub fn choice(m: Term, p: crate::Probability, n: Term) -> Term {
        Term::Choice(Box::new(m), p, Box::new(n))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Val(_))
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Term::Val(v) => Some(v),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Val(v) => v.collect_free(bound, out),
            Term::App(v, w) => {
                v.collect_free(bound, out);
                w.collect_free(bound, out);
            }
            Term::Let(x, m, n) => {
                m.collect_free(bound, out);
                bound.push(x.clone());
                n.collect_free(bound, out);
                bound.pop();
            }
            Term::Choice(m, _, n) => {
                m.collect_free(bound, out);
                n.collect_free(bound, out);
            }
            Term::Case(v, w, z) => {
                v.collect_free(bound, out);
                w.collect_free(bound, out);
                z.collect_free(bound, out);
            }
        }
    }

    pub fn erase(&self) -> Term {
        match self {
            Term::Val(v) => Term::Val(v.erase()),
            Term::App(v, w) => Term::App(v.erase(), w.erase()),
            Term::Let(x, m, n) => Term::Let(x.clone(), Box::new(m.erase()), Box::new(n.erase())),
            Term::Choice(m, p, n) => Term::Choice(Box::new(m.erase()), p.clone(), Box::new(n.erase())),
            Term::Case(v, w, z) => Term::Case(v.erase(), w.erase(), z.erase()),
        }
    }

    /// Every binder name occurring in the term, in traversal order.
    pub fn binders(&self) -> Vec<Name> {
        let mut out = Vec::new();
        fn value(v: &Value, out: &mut Vec<Name>) {
            match v {
                Value::Var(_) | Value::Zero => {}
                Value::Succ(v) => value(v, out),
                Value::Lam(x, _, body) => {
                    out.push(x.clone());
                    term(body, out);
                }
                Value::LetRec(f, _, body) => {
                    out.push(f.clone());
                    value(body, out);
                }
            }
        }
        fn term(t: &Term, out: &mut Vec<Name>) {
            match t {
                Term::Val(v) => value(v, out),
                Term::App(v, w) => {
                    value(v, out);
                    value(w, out);
                }
                Term::Let(x, m, n) => {
                    out.push(x.clone());
                    term(m, out);
                    term(n, out);
                }
                Term::Choice(m, _, n) => {
                    term(m, out);
                    term(n, out);
                }
                Term::Case(v, w, z) => {
                    value(v, out);
                    value(w, out);
                    value(z, out);
                }
            }
        }
        term(self, &mut out);
        out
    }
}

/// `S^n 0`.
pub fn encode_nat(n: u64) -> Value {
    let mut v = Value::Zero;
    for _ in 0..n {
        v = Value::succ(v);
    }
    v
}

pub fn decode_nat(v: &Value) -> Option<u64> {
    let mut n = 0u64;
    let mut cur = v;
    loop {
        match cur {
            Value::Zero => return Some(n),
            Value::Succ(inner) => {
                n += 1;
                cur = inner;
            }
            _ => return None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals_round_trip() {
        assert_eq!(encode_nat(0), Value::Zero);
        assert_eq!(
            encode_nat(3),
            Value::succ(Value::succ(Value::succ(Value::Zero)))
        );
        for n in [0, 1, 7, 40] {
            assert_eq!(decode_nat(&encode_nat(n)), Some(n));
        }
        assert_eq!(decode_nat(&Value::lam("x", Term::Val(Value::var("x")))), None);
        assert_eq!(decode_nat(&Value::succ(Value::var("x"))), None);
    }

    #[test]
    fn free_variables() {
        assert!(Term::Val(Value::Zero).free_vars().is_empty());
        let app = Term::app(Value::var("f"), Value::var("x"));
        assert_eq!(
            app.free_vars(),
            ["f", "x"].iter().map(|s| s.to_string()).collect()
        );
        let rec = Value::letrec("f", Value::lam("x", Term::app(Value::var("f"), Value::var("x"))));
        assert!(rec.free_vars().is_empty());
        let open = Term::let_in("x", Term::Val(Value::var("y")), Term::Val(Value::var("x")));
        assert_eq!(open.free_vars(), ["y".to_string()].into_iter().collect());
    }
}
