//! Pretty-printer emitting the concrete syntax accepted by the parser.

use std::fmt;

use super::ast::{decode_nat, LetRecAnnot, Term, Value};

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

pub fn print_value(v: &Value) -> String {
    v.to_string()
}

/// Values that print as a single token or a parenthesised group.
fn is_atomic(v: &Value) -> bool {
    matches!(v, Value::Var(_)) || decode_nat(v).is_some()
}

struct Atom<'a>(&'a Value);

impl fmt::Display for Atom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

/// Left operand of a choice: anything that extends to the right must be
/// parenthesised.
struct ChoiceLeft<'a>(&'a Term);

impl fmt::Display for ChoiceLeft<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Choice(..) | Term::Let(..) | Term::Val(Value::Lam(..)) | Term::Val(Value::LetRec(..)) => {
                write!(f, "({})", self.0)
            }
            _ => write!(f, "{}", self.0),
        }
    }
}

impl fmt::Display for LetRecAnnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}", self.var, self.nu)?;
        if let Some(fam) = &self.family {
            write!(f, "; {{")?;
            for (k, (s, p)) in fam.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{s} ^ {p}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = decode_nat(self) {
            return write!(f, "{n}");
        }
        match self {
            Value::Var(x) => write!(f, "{x}"),
            Value::Zero => write!(f, "0"),
            Value::Succ(v) => write!(f, "S {}", Atom(v)),
            Value::Lam(x, None, body) => write!(f, "\\{x}. {body}"),
            Value::Lam(x, Some(t), body) => write!(f, "\\{x}: {t}. {body}"),
            Value::LetRec(g, None, body) => write!(f, "letrec {g} = {body}"),
            Value::LetRec(g, Some(a), body) => write!(f, "letrec {g} {a} = {body}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Val(v) => write!(f, "{v}"),
            Term::App(v, w) => write!(f, "{} {}", Atom(v), Atom(w)),
            Term::Let(x, m, n) => write!(f, "let {x} = {m} in {n}"),
            Term::Choice(m, p, n) => write!(f, "{} (+ {p}) {n}", ChoiceLeft(m)),
            Term::Case(v, w, z) => write!(f, "case {v} of {{ S -> {w} | 0 -> {z} }}"),
        }
    }
}
