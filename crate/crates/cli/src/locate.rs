//! Naming the syntax node a child path points at.

use mast_core::syntax::{Term, Value};

#[derive(Clone, Copy)]
enum Node<'a> {
    T(&'a Term),
    V(&'a Value),
}

impl<'a> Node<'a> {
    fn child(self, k: usize) -> Option<Node<'a>> {
        match self {
            Node::T(Term::Val(v)) if k == 0 => Some(Node::V(v)),
            Node::T(Term::App(f, a)) => [f, a].get(k).map(|v| Node::V(v)),
            Node::T(Term::Let(_, m, n)) => [m, n].get(k).map(|t| Node::T(t)),
            Node::T(Term::Choice(m, _, n)) => [m, n].get(k).map(|t| Node::T(t)),
            Node::T(Term::Case(v, w, z)) => [v, w, z].get(k).map(|v| Node::V(v)),
            Node::V(Value::Succ(v)) if k == 0 => Some(Node::V(v)),
            Node::V(Value::Lam(_, _, b)) if k == 0 => Some(Node::T(b)),
            Node::V(Value::LetRec(_, _, b)) if k == 0 => Some(Node::V(b)),
            _ => None,
        }
    }

    fn rule(self) -> &'static str {
        match self {
            Node::T(Term::Val(v)) => Node::V(v).rule(),
            Node::T(Term::App(..)) => "App",
            Node::T(Term::Let(..)) => "Let",
            Node::T(Term::Choice(..)) => "Choice",
            Node::T(Term::Case(..)) => "Case",
            Node::V(Value::Var(_)) => "Var",
            Node::V(Value::Zero) => "Zero",
            Node::V(Value::Succ(_)) => "Succ",
            Node::V(Value::Lam(..)) => "Lambda",
            Node::V(Value::LetRec(..)) => "LetRec",
        }
    }
}

/// The typing rule of the deepest node reached along `path`.
pub fn rule_at(t: &Term, path: &[usize]) -> &'static str {
    let mut cur = Node::T(t);
    for &k in path {
        match cur.child(k) {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur.rule()
}
