use std::collections::BTreeSet;

use super::ast::{Name, Term, Value};

/// Capture-avoiding substitution `t[v/x]`.
///
/// The semantics only ever substitutes closed values, in which case no
/// binder is renamed. For open `v`, binders that would capture one of its
/// free variables are renamed to a fresh `base_k`.
pub fn subst_value(t: &Term, x: &str, v: &Value) -> Term {
    let fv = v.free_vars();
    let mut s = Subst { x, v, fv: &fv };
    s.term(t)
}

/// `w[v/x]` on values.
pub fn subst_in_value(w: &Value, x: &str, v: &Value) -> Value {
    let fv = v.free_vars();
    let mut s = Subst { x, v, fv: &fv };
    s.value(w)
}

struct Subst<'a> {
    x: &'a str,
    v: &'a Value,
    fv: &'a BTreeSet<Name>,
}

impl Subst<'_> {
    fn value(&mut self, w: &Value) -> Value {
        match w {
            Value::Var(y) if y == self.x => self.v.clone(),
            Value::Var(_) | Value::Zero => w.clone(),
            Value::Succ(inner) => Value::succ(self.value(inner)),
            Value::Lam(y, ann, body) => {
                if y == self.x {
                    return w.clone();
                }
                if self.fv.contains(y) {
                    let fresh = self.fresh(y, &body.free_vars());
                    let renamed = rename_term(body, y, &fresh);
                    return Value::Lam(fresh, ann.clone(), Box::new(self.term(&renamed)));
                }
                Value::Lam(y.clone(), ann.clone(), Box::new(self.term(body)))
            }
            Value::LetRec(f, ann, body) => {
                if f == self.x {
                    return w.clone();
                }
                if self.fv.contains(f) {
                    let fresh = self.fresh(f, &body.free_vars());
                    let renamed = rename_value(body, f, &fresh);
                    return Value::LetRec(fresh, ann.clone(), Box::new(self.value(&renamed)));
                }
                Value::LetRec(f.clone(), ann.clone(), Box::new(self.value(body)))
            }
        }
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Val(w) => Term::Val(self.value(w)),
            Term::App(a, b) => Term::App(self.value(a), self.value(b)),
            Term::Let(y, m, n) => {
                let m2 = self.term(m);
                if y == self.x {
                    return Term::Let(y.clone(), Box::new(m2), n.clone());
                }
                if self.fv.contains(y) {
                    let fresh = self.fresh(y, &n.free_vars());
                    let renamed = rename_term(n, y, &fresh);
                    return Term::Let(fresh, Box::new(m2), Box::new(self.term(&renamed)));
                }
                Term::Let(y.clone(), Box::new(m2), Box::new(self.term(n)))
            }
            Term::Choice(m, p, n) => {
                Term::Choice(Box::new(self.term(m)), p.clone(), Box::new(self.term(n)))
            }
            Term::Case(a, b, c) => Term::Case(self.value(a), self.value(b), self.value(c)),
        }
    }

    fn fresh(&self, base: &str, avoid: &BTreeSet<Name>) -> Name {
        (1..)
            .map(|k| format!("{base}_{k}"))
            .find(|n| !self.fv.contains(n) && !avoid.contains(n) && n != self.x)
            .expect("unbounded supply of names")
    }
}

fn rename_term(t: &Term, from: &str, to: &str) -> Term {
    subst_value(t, from, &Value::Var(to.to_string()))
}

fn rename_value(w: &Value, from: &str, to: &str) -> Value {
    subst_in_value(w, from, &Value::Var(to.to_string()))
}
