//! Terms and values of the calculus in A-normal form, the `.lop` concrete
//! syntax and substitution.

mod ast;
mod lexer;
mod parser;
mod print;
mod subst;

use thiserror::Error;

pub use ast::{decode_nat, encode_nat, LetRecAnnot, Name, Term, Value};
pub use lexer::Span;
pub use parser::{parse, parse_dist_type, parse_raw, parse_type, parse_with_spans, SpanTree};
pub use print::{print_term, print_value};
pub use subst::{subst_in_value, subst_value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(span: Span, message: String) -> ParseError {
        ParseError { line: span.line, col: span.col, message }
    }

    pub fn span(&self) -> Span {
        Span { line: self.line, col: self.col }
    }
}
