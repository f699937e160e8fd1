use std::collections::BTreeSet;

use num_traits::Zero;

use super::ast::{encode_nat, LetRecAnnot, Name, Term, Value};
use super::lexer::{lex, Span, Tok};
use super::ParseError;
use crate::ratio::parse_ratio;
use crate::sized::{DistType, Size, SizedType};
use crate::{Probability, Ratio};

/// Source positions mirroring the children of a [`Term`] or [`Value`].
///
/// Child order: `App [f, a]`, `Let [m, n]`, `Choice [m, n]`,
/// `Case [v, w, z]`, `Succ [v]`, `Lam [body]`, `LetRec [body]`, `Val [v]`;
/// variables and `0` are leaves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(span: Span) -> SpanTree {
        SpanTree { span, children: Vec::new() }
    }

    fn node(span: Span, children: Vec<SpanTree>) -> SpanTree {
        SpanTree { span, children }
    }

    /// Follows a child path, stopping at the deepest node that exists.
    pub fn locate(&self, path: &[usize]) -> Span {
        let mut cur = self;
        for &k in path {
            match cur.children.get(k) {
                Some(c) => cur = c,
                None => break,
            }
        }
        cur.span
    }
}

/// Parses a `.lop` program, desugaring to A-normal form and renaming every
/// binder apart from the free variables and from each other.
pub fn parse(src: &str) -> Result<Term, ParseError> {
    parse_with_spans(src).map(|(t, _)| t)
}

pub fn parse_with_spans(src: &str) -> Result<(Term, SpanTree), ParseError> {
    run(src, true)
}

/// Like [`parse`] but keeps binder names as written. Used for re-reading
/// printed subterms, whose binders are already distinct.
pub fn parse_raw(src: &str) -> Result<Term, ParseError> {
    run(src, false).map(|(t, _)| t)
}

pub fn parse_type(src: &str) -> Result<SizedType, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

pub fn parse_dist_type(src: &str) -> Result<DistType, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.dist_ty()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

fn run(src: &str, rename: bool) -> Result<(Term, SpanTree), ParseError> {
    let mut p = Parser::new(src)?;
    let surf = p.term()?;
    p.expect(&Tok::Eof)?;
    let mut used = BTreeSet::new();
    surf.names(&mut Vec::new(), &mut used, rename);
    let mut d = Desugar { rename, used, env: Vec::new() };
    d.term(&surf)
}

#[derive(Debug, Clone)]
struct Surf {
    kind: Kind,
    span: Span,
}

#[derive(Debug, Clone)]
enum Kind {
    Var(String),
    Num(u64),
    Succ(Box<Surf>),
    Lam(String, Option<SizedType>, Box<Surf>),
    LetRec(String, Option<LetRecAnnot>, Box<Surf>),
    App(Box<Surf>, Box<Surf>),
    Let(String, Box<Surf>, Box<Surf>),
    Choice(Box<Surf>, Probability, Box<Surf>),
    Case(Box<Surf>, Box<Surf>, Box<Surf>),
    Seq(Box<Surf>, Box<Surf>),
}

impl Surf {
    /// Collects the names that fresh binders must avoid: the free names
    /// when renaming, every name otherwise.
    fn names(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>, rename: bool) {
        let under = |x: &String, body: &Surf, bound: &mut Vec<String>, out: &mut BTreeSet<String>| {
            if !rename {
                out.insert(x.clone());
            }
            bound.push(x.clone());
            body.names(bound, out, rename);
            bound.pop();
        };
        match &self.kind {
            Kind::Var(x) => {
                if !rename || !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Kind::Num(_) => {}
            Kind::Succ(a) => a.names(bound, out, rename),
            Kind::Lam(x, _, b) | Kind::LetRec(x, _, b) => under(x, b, bound, out),
            Kind::Let(x, m, n) => {
                m.names(bound, out, rename);
                under(x, n, bound, out);
            }
            Kind::App(a, b) | Kind::Choice(a, _, b) | Kind::Seq(a, b) => {
                a.names(bound, out, rename);
                b.names(bound, out, rename);
            }
            Kind::Case(a, b, c) => {
                a.names(bound, out, rename);
                b.names(bound, out, rename);
                c.names(bound, out, rename);
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{t}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::at(self.span(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        match *self.peek() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn rational(&mut self) -> Result<Ratio, ParseError> {
        let span = self.span();
        let num = self.number()?;
        let den = if self.eat(&Tok::Slash) { self.number()? } else { 1 };
        parse_ratio(&format!("{num}/{den}")).ok_or_else(|| ParseError::at(span, "zero denominator".into()))
    }

    fn term(&mut self) -> Result<Surf, ParseError> {
        let lhs = self.choice()?;
        if self.peek() == &Tok::Semi {
            let span = self.span();
            self.bump();
            let rhs = self.term()?;
            return Ok(Surf { kind: Kind::Seq(Box::new(lhs), Box::new(rhs)), span });
        }
        Ok(lhs)
    }

    fn choice(&mut self) -> Result<Surf, ParseError> {
        let lhs = self.app()?;
        if self.peek() == &Tok::ChoiceOpen {
            let span = self.span();
            self.bump();
            let p = if self.peek() == &Tok::RParen {
                Probability::half()
            } else {
                let at = self.span();
                let r = self.rational()?;
                Probability::new(r).map_err(|e| ParseError::at(at, e.to_string()))?
            };
            self.expect(&Tok::RParen)?;
            let rhs = self.choice()?;
            return Ok(Surf { kind: Kind::Choice(Box::new(lhs), p, Box::new(rhs)), span });
        }
        Ok(lhs)
    }

    fn starts_item(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Succ
                | Tok::Num(_)
                | Tok::Ident(_)
                | Tok::LParen
                | Tok::Backslash
                | Tok::Let
                | Tok::Case
                | Tok::Letrec
        )
    }

    fn app(&mut self) -> Result<Surf, ParseError> {
        if !self.starts_item() {
            return Err(self.unexpected("a term"));
        }
        let mut head = self.item()?;
        while self.starts_item() {
            let arg = self.item()?;
            let span = head.span;
            head = Surf { kind: Kind::App(Box::new(head), Box::new(arg)), span };
        }
        Ok(head)
    }

    fn item(&mut self) -> Result<Surf, ParseError> {
        let span = self.span();
        let kind = match self.bump() {
            Tok::Succ => {
                if !self.starts_item() {
                    return Err(self.unexpected("an argument to `S`"));
                }
                Kind::Succ(Box::new(self.item()?))
            }
            Tok::Num(n) => Kind::Num(n),
            Tok::Ident(x) => Kind::Var(x),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                return Ok(t);
            }
            Tok::Backslash => {
                let x = self.ident()?;
                let ann = if self.eat(&Tok::Colon) { Some(self.ty()?) } else { None };
                self.expect(&Tok::Dot)?;
                Kind::Lam(x, ann, Box::new(self.term()?))
            }
            Tok::Let => {
                let x = self.ident()?;
                self.expect(&Tok::Eq)?;
                let m = self.term()?;
                self.expect(&Tok::In)?;
                let n = self.term()?;
                Kind::Let(x, Box::new(m), Box::new(n))
            }
            Tok::Case => {
                let v = self.term()?;
                self.expect(&Tok::Of)?;
                self.expect(&Tok::LBrace)?;
                let mut succ = None;
                let mut zero = None;
                for k in 0..2 {
                    if k == 1 {
                        self.expect(&Tok::Bar)?;
                    }
                    let at = self.span();
                    match self.bump() {
                        Tok::Succ if succ.is_none() => {
                            self.expect(&Tok::Arrow)?;
                            succ = Some(self.term()?);
                        }
                        Tok::Num(0) if zero.is_none() => {
                            self.expect(&Tok::Arrow)?;
                            zero = Some(self.term()?);
                        }
                        _ => return Err(ParseError::at(at, "expected a `S ->` or `0 ->` branch".into())),
                    }
                }
                self.expect(&Tok::RBrace)?;
                Kind::Case(Box::new(v), Box::new(succ.expect("two branches")), Box::new(zero.expect("two branches")))
            }
            Tok::Letrec => {
                let f = self.ident()?;
                let ann = if self.eat(&Tok::LBracket) {
                    let a = self.letrec_annot()?;
                    self.expect(&Tok::RBracket)?;
                    Some(a)
                } else {
                    None
                };
                self.expect(&Tok::Eq)?;
                Kind::LetRec(f, ann, Box::new(self.term()?))
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("a term"));
            }
        };
        Ok(Surf { kind, span })
    }

    fn letrec_annot(&mut self) -> Result<LetRecAnnot, ParseError> {
        let var = self.ident()?;
        self.expect(&Tok::Semi)?;
        let nu = self.dist_ty()?;
        let family = if self.eat(&Tok::Semi) {
            self.expect(&Tok::LBrace)?;
            let mut entries = Vec::new();
            if !self.eat(&Tok::RBrace) {
                loop {
                    let s = self.size()?;
                    self.expect(&Tok::Caret)?;
                    let at = self.span();
                    let p = self.rational()?;
                    if p <= Ratio::zero() {
                        return Err(ParseError::at(at, "family weights must be positive".into()));
                    }
                    entries.push((s, p));
                    if self.eat(&Tok::RBrace) {
                        break;
                    }
                    self.expect(&Tok::Comma)?;
                }
            }
            Some(entries)
        } else {
            None
        };
        Ok(LetRecAnnot { var, nu, family })
    }

    fn size(&mut self) -> Result<Size, ParseError> {
        let x = self.ident()?;
        if x == "inf" {
            return Ok(Size::Inf);
        }
        let k = if self.eat(&Tok::Plus) { self.number()? } else { 0 };
        Ok(Size::fin(&x, k))
    }

    /// `type := atype ["->" dtype]`
    fn ty(&mut self) -> Result<SizedType, ParseError> {
        let dom = self.atype()?;
        if self.eat(&Tok::Arrow) {
            let cod = self.dist_ty()?;
            return Ok(SizedType::arrow(dom, cod));
        }
        Ok(dom)
    }

    fn atype(&mut self) -> Result<SizedType, ParseError> {
        let span = self.span();
        match self.bump() {
            Tok::Ident(x) if x == "Nat" => {
                if self.eat(&Tok::LBracket) {
                    let s = self.size()?;
                    self.expect(&Tok::RBracket)?;
                    Ok(SizedType::Nat(s))
                } else {
                    Ok(SizedType::nat_inf())
                }
            }
            Tok::LParen => {
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => Err(ParseError::at(span, "expected a type".into())),
        }
    }

    /// `dtype := "{" type "^" rational ("," type "^" rational)* "}" | type`
    fn dist_ty(&mut self) -> Result<DistType, ParseError> {
        let span = self.span();
        if !self.eat(&Tok::LBrace) {
            return Ok(DistType::dirac(self.ty()?));
        }
        let mut entries = Vec::new();
        loop {
            let t = self.ty()?;
            self.expect(&Tok::Caret)?;
            let p = self.rational()?;
            entries.push((t, p));
            if self.eat(&Tok::RBrace) {
                break;
            }
            self.expect(&Tok::Comma)?;
        }
        DistType::new(entries).map_err(|e| ParseError::at(span, e.to_string()))
    }
}

struct Desugar {
    rename: bool,
    used: BTreeSet<String>,
    env: Vec<(String, String)>,
}

impl Desugar {
    fn fresh(&mut self, base: &str) -> Name {
        let name = if !self.used.contains(base) {
            base.to_string()
        } else {
            (1..)
                .map(|k| format!("{base}_{k}"))
                .find(|n| !self.used.contains(n))
                .expect("unbounded supply of names")
        };
        self.used.insert(name.clone());
        name
    }

    fn bind(&mut self, x: &str) -> Name {
        if self.rename {
            self.fresh(x)
        } else {
            x.to_string()
        }
    }

    fn lookup(&self, x: &str) -> Name {
        self.env
            .iter()
            .rev()
            .find(|(src, _)| src == x)
            .map(|(_, n)| n.clone())
            .unwrap_or_else(|| x.to_string())
    }

    fn term(&mut self, s: &Surf) -> Result<(Term, SpanTree), ParseError> {
        let span = s.span;
        match &s.kind {
            Kind::Var(_) | Kind::Num(_) | Kind::Lam(..) | Kind::LetRec(..) => {
                let (v, tree) = self.value(s)?;
                Ok((Term::Val(v), SpanTree::node(span, vec![tree])))
            }
            Kind::Succ(inner) => {
                let (t, tree) = self.term(inner)?;
                match t {
                    Term::Val(v) => {
                        let vt = SpanTree::node(span, tree.children);
                        Ok((Term::Val(Value::succ(v)), SpanTree::node(span, vec![vt])))
                    }
                    other => {
                        let z = self.fresh("_t");
                        let body = Term::Val(Value::succ(Value::Var(z.clone())));
                        let body_tree = SpanTree::node(
                            span,
                            vec![SpanTree::node(span, vec![SpanTree::leaf(span)])],
                        );
                        Ok((
                            Term::Let(z, Box::new(other), Box::new(body)),
                            SpanTree::node(span, vec![tree, body_tree]),
                        ))
                    }
                }
            }
            Kind::App(a, b) => {
                let (ta, tra) = self.term(a)?;
                let (tb, trb) = self.term(b)?;
                let mut lets = Vec::new();
                let (va, vta) = self.atomize(ta, tra, &mut lets);
                let (vb, vtb) = self.atomize(tb, trb, &mut lets);
                let core = (Term::App(va, vb), SpanTree::node(span, vec![vta, vtb]));
                Ok(wrap_lets(lets, core))
            }
            Kind::Let(x, m, n) => {
                let (tm, trm) = self.term(m)?;
                let x2 = self.bind(x);
                self.env.push((x.clone(), x2.clone()));
                let res = self.term(n);
                self.env.pop();
                let (tn, trn) = res?;
                Ok((Term::Let(x2, Box::new(tm), Box::new(tn)), SpanTree::node(span, vec![trm, trn])))
            }
            Kind::Choice(m, p, n) => {
                let (tm, trm) = self.term(m)?;
                let (tn, trn) = self.term(n)?;
                Ok((
                    Term::Choice(Box::new(tm), p.clone(), Box::new(tn)),
                    SpanTree::node(span, vec![trm, trn]),
                ))
            }
            Kind::Case(v, w, z) => {
                let (tv, trv) = self.term(v)?;
                let (vw, trw) = self.value(w)?;
                let (vz, trz) = self.value(z)?;
                let mut lets = Vec::new();
                let (vv, vtv) = self.atomize(tv, trv, &mut lets);
                let core = (Term::Case(vv, vw, vz), SpanTree::node(span, vec![vtv, trw, trz]));
                Ok(wrap_lets(lets, core))
            }
            Kind::Seq(m, n) => {
                // M ; N  =  (\_a. \_b. 0) M N
                let zero = Surf { kind: Kind::Num(0), span };
                let inner = Surf { kind: Kind::Lam("_b".into(), None, Box::new(zero)), span };
                let k = Surf { kind: Kind::Lam("_a".into(), None, Box::new(inner)), span };
                let app1 = Surf { kind: Kind::App(Box::new(k), m.clone()), span };
                let app2 = Surf { kind: Kind::App(Box::new(app1), n.clone()), span };
                self.term(&app2)
            }
        }
    }

    /// Turns a term into a value, recording a `let` for non-values.
    fn atomize(&mut self, t: Term, tree: SpanTree, lets: &mut Vec<(Name, Term, SpanTree)>) -> (Value, SpanTree) {
        match t {
            Term::Val(v) => {
                let vt = tree.children.into_iter().next().unwrap_or_default();
                (v, vt)
            }
            other => {
                let span = tree.span;
                let x = self.fresh("_t");
                lets.push((x.clone(), other, tree));
                (Value::Var(x), SpanTree::leaf(span))
            }
        }
    }

    fn value(&mut self, s: &Surf) -> Result<(Value, SpanTree), ParseError> {
        let span = s.span;
        match &s.kind {
            Kind::Var(x) => Ok((Value::Var(self.lookup(x)), SpanTree::leaf(span))),
            Kind::Num(n) => {
                let mut tree = SpanTree::leaf(span);
                for _ in 0..*n {
                    tree = SpanTree::node(span, vec![tree]);
                }
                Ok((encode_nat(*n), tree))
            }
            Kind::Succ(inner) => {
                let (v, tree) = self.value(inner)?;
                Ok((Value::succ(v), SpanTree::node(span, vec![tree])))
            }
            Kind::Lam(x, ann, body) => {
                let x2 = self.bind(x);
                self.env.push((x.clone(), x2.clone()));
                let res = self.term(body);
                self.env.pop();
                let (tb, trb) = res?;
                Ok((Value::Lam(x2, ann.clone(), Box::new(tb)), SpanTree::node(span, vec![trb])))
            }
            Kind::LetRec(f, ann, body) => {
                let f2 = self.bind(f);
                self.env.push((f.clone(), f2.clone()));
                let res = self.value(body);
                self.env.pop();
                let (vb, trb) = res.map_err(|e| {
                    ParseError::at(e.span(), format!("the body of `letrec {f}` must be a value"))
                })?;
                Ok((Value::LetRec(f2, ann.clone(), Box::new(vb)), SpanTree::node(span, vec![trb])))
            }
            _ => Err(ParseError::at(
                span,
                "a value is required here (variable, numeral, `S v`, abstraction or letrec)".into(),
            )),
        }
    }
}

fn wrap_lets(lets: Vec<(Name, Term, SpanTree)>, core: (Term, SpanTree)) -> (Term, SpanTree) {
    lets.into_iter().rev().fold(core, |(body, btree), (x, m, mtree)| {
        let span = mtree.span;
        (Term::Let(x, Box::new(m), Box::new(body)), SpanTree::node(span, vec![mtree, btree]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::ratio;

    fn half() -> Probability {
        Probability::half()
    }

    #[test]
    fn choice_of_zeros() {
        assert_eq!(
            parse("0 (+ 1/2) 0").unwrap(),
            Term::choice(Term::Val(Value::Zero), half(), Term::Val(Value::Zero))
        );
        assert_eq!(
            parse("0 (+) 0").unwrap(),
            Term::choice(Term::Val(Value::Zero), half(), Term::Val(Value::Zero))
        );
    }

    #[test]
    fn identity() {
        assert_eq!(parse("\\x. x").unwrap(), Term::Val(Value::lam("x", Term::Val(Value::var("x")))));
    }

    #[test]
    fn numerals_desugar() {
        assert_eq!(parse("3").unwrap(), Term::Val(encode_nat(3)));
        assert_eq!(parse("S S 1").unwrap(), Term::Val(encode_nat(3)));
    }

    #[test]
    fn biased_walk_recursion() {
        let src = "letrec f = \\x. case x of { S -> \\y. (f y) (+ 2/3) (f (S (S y))) | 0 -> 0 }";
        let t = parse(src).unwrap();
        let body = Term::choice(
            Term::app(Value::var("f"), Value::var("y")),
            Probability::new(ratio(2, 3)).unwrap(),
            Term::app(Value::var("f"), Value::succ(Value::succ(Value::var("y")))),
        );
        let expected = Value::letrec(
            "f",
            Value::lam(
                "x",
                Term::Case(Value::var("x"), Value::lam("y", body), Value::Zero),
            ),
        );
        assert_eq!(t, Term::Val(expected));
    }

    #[test]
    fn general_application_is_let_bound() {
        let t = parse("f (g x) y").unwrap();
        // let _t = g x in f _t y  =>  let _t_1 = (let _t = g x in f _t) in _t_1 y
        match t {
            Term::Let(a, m, n) => {
                assert!(matches!(*m, Term::Let(..)));
                assert_eq!(*n, Term::app(Value::Var(a), Value::var("y")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sequencing_sugar() {
        let t = parse("x ; y").unwrap();
        let k = Value::lam("_a", Term::Val(Value::lam("_b", Term::Val(Value::Zero))));
        match t {
            Term::Let(a, m, n) => {
                assert_eq!(*m, Term::app(k, Value::var("x")));
                assert_eq!(*n, Term::app(Value::Var(a), Value::var("y")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn binders_are_renamed_apart() {
        let t = parse("(\\x. x) (\\x. x) x").unwrap();
        let binders = t.binders();
        let distinct: BTreeSet<_> = binders.iter().collect();
        assert_eq!(distinct.len(), binders.len());
        assert!(!binders.contains(&"x".to_string()));
        assert!(t.free_vars().contains("x"));
    }

    #[test]
    fn raw_mode_keeps_names() {
        let t = parse_raw("(\\x. x) (\\x. x)").unwrap();
        assert_eq!(t.binders(), vec!["x".to_string(), "x".to_string()]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("let x = 0 in\n  (0 (+ 3/2) 0)").unwrap_err();
        assert_eq!((e.line, e.col), (2, 9));
        let e = parse("letrec f = f 0").unwrap_err();
        assert!(e.message.contains("must be a value"), "{e}");
        assert!(parse("case 0 of { S -> \\y. y 0 | 0 -> 0 (+) 0 }").is_err());
        assert!(parse("(0").is_err());
    }

    #[test]
    fn types_and_annotations() {
        let t = parse_type("Nat[i+2] -> {Nat[i] ^ 2/3, Nat[inf] ^ 1/3}").unwrap();
        assert_eq!(t.to_string(), "Nat[i+2] -> {Nat[i] ^ 2/3, Nat[inf] ^ 1/3}");
        assert_eq!(parse_type("Nat").unwrap(), SizedType::nat_inf());
        let t = parse("letrec f [i; Nat; {i ^ 2/3, i+2 ^ 1/3}] = \\x. x").unwrap();
        match t {
            Term::Val(Value::LetRec(_, Some(a), _)) => {
                assert_eq!(a.var, "i");
                assert_eq!(a.nu, DistType::dirac(SizedType::nat_inf()));
                assert_eq!(a.family.unwrap().len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn span_tree_mirrors_ast() {
        let (t, tree) = parse_with_spans("case x of { S -> \\y. y | 0 -> 0 }").unwrap();
        assert!(matches!(t, Term::Case(..)));
        assert_eq!(tree.children.len(), 3);
        assert_eq!(tree.locate(&[1]), Span { line: 1, col: 18 });
        assert_eq!(tree.locate(&[1, 0, 0]), Span { line: 1, col: 22 });
    }
}
