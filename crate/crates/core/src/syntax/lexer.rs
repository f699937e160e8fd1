use std::fmt;

use serde::Serialize;

use super::ParseError;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Backslash,
    Dot,
    Colon,
    LParen,
    RParen,
    /// `(+`, the opening of a choice label
    ChoiceOpen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Bar,
    Arrow,
    Semi,
    Eq,
    Comma,
    Caret,
    Plus,
    Slash,
    Let,
    In,
    Case,
    Of,
    Letrec,
    Succ,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::Num(n) => return write!(f, "number `{n}`"),
            Tok::Backslash => "`\\`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::ChoiceOpen => "`(+`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::Semi => "`;`",
            Tok::Eq => "`=`",
            Tok::Comma => "`,`",
            Tok::Caret => "`^`",
            Tok::Plus => "`+`",
            Tok::Slash => "`/`",
            Tok::Let => "`let`",
            Tok::In => "`in`",
            Tok::Case => "`case`",
            Tok::Of => "`of`",
            Tok::Letrec => "`letrec`",
            Tok::Succ => "`S`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| ParseError::at(span, format!("numeral `{text}` is too large")))?;
            out.push((Tok::Num(n), span));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                bump!();
            }
            let text: String = chars[start..i].iter().collect();
            let tok = match text.as_str() {
                "let" => Tok::Let,
                "in" => Tok::In,
                "case" => Tok::Case,
                "of" => Tok::Of,
                "letrec" => Tok::Letrec,
                "S" => Tok::Succ,
                _ => Tok::Ident(text),
            };
            out.push((tok, span));
            continue;
        }
        let tok = match c {
            '(' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '\n' && chars[j].is_whitespace() {
                    j += 1;
                }
                if chars.get(j) == Some(&'+') {
                    while i <= j {
                        bump!();
                    }
                    out.push((Tok::ChoiceOpen, span));
                    continue;
                }
                Tok::LParen
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                bump!();
                Tok::Arrow
            }
            '\\' | 'λ' => Tok::Backslash,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '|' => Tok::Bar,
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            ',' => Tok::Comma,
            '^' => Tok::Caret,
            '+' => Tok::Plus,
            '/' => Tok::Slash,
            _ => return Err(ParseError::at(span, format!("unexpected character `{c}`"))),
        };
        bump!();
        out.push((tok, span));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}
