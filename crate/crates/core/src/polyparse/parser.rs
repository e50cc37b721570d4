//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/')? unary)*      juxtaposition multiplies
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | variable | 'i' | '(' expr ')'
//! ```
//!
//! Numbers may be integers, decimals or carry an exponent (`1.5e-3`); all of
//! them are read as exact rationals. `/` divides by a nonzero constant only.

use num_bigint::BigInt;
use thiserror::Error;

use super::{ExponentTuple, SparsePolynomial};
use crate::rational::Rational;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable {name} at position {position} exceeds dimension {dim}")]
    VariableOutOfRange {
        name: String,
        position: usize,
        dim: usize,
    },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
}

/// How identifiers map to coordinates.
#[derive(Debug, Clone, Copy)]
pub enum Variables<'a> {
    /// `z1 … zn`.
    Indexed { dim: usize },
    /// A fixed list such as `["x", "y"]`.
    Named(&'a [&'a str]),
}

impl Variables<'_> {
    fn dim(&self) -> usize {
        match self {
            Variables::Indexed { dim } => *dim,
            Variables::Named(names) => names.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexed {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { position, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Lexed { tok, pos });
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let (value, integral, next) = lex_number(&chars, i)?;
            out.push(Lexed { tok: Tok::Num(value, integral), pos });
            i = next;
            continue;
        }
        if c.is_ascii_alphabetic() {
            // one letter per identifier, except `z` absorbs its index digits
            let mut j = i + 1;
            if c == 'z' {
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            out.push(Lexed { tok: Tok::Ident(chars[i..j].iter().collect()), pos });
            i = j;
            continue;
        }
        return Err(syntax(pos, format!("unexpected character {c:?}")));
    }
    Ok(out)
}

fn lex_number(chars: &[char], start: usize) -> Result<(Rational, bool, usize), ParseError> {
    let mut i = start;
    let mut digits = String::new();
    let mut frac = String::new();
    while i < chars.len() && chars[i].is_ascii_digit() {
        digits.push(chars[i]);
        i += 1;
    }
    let mut integral = true;
    if i < chars.len() && chars[i] == '.' {
        integral = false;
        i += 1;
        while i < chars.len() && chars[i].is_ascii_digit() {
            frac.push(chars[i]);
            i += 1;
        }
    }
    if digits.is_empty() && frac.is_empty() {
        return Err(syntax(start, "malformed number"));
    }
    let mut exp10: i64 = 0;
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        let mut sign = 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            if chars[j] == '-' {
                sign = -1;
            }
            j += 1;
        }
        let exp_start = j;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            return Err(syntax(i, "missing exponent digits"));
        }
        let e: String = chars[exp_start..j].iter().collect();
        exp10 = sign * e.parse::<i64>().map_err(|_| syntax(i, "exponent too large"))?;
        if exp10.abs() > 10_000 {
            return Err(syntax(i, "exponent too large"));
        }
        integral = false;
        i = j;
    }
    let mantissa: BigInt = format!("{digits}{frac}0").parse::<BigInt>().unwrap() / 10;
    let shift = exp10 - frac.len() as i64;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        Rational::from_integer(mantissa * ten.pow(shift as u32))
    } else {
        Rational::new(mantissa, ten.pow((-shift) as u32))
    };
    Ok((value, integral, i))
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    at: usize,
    vars: Variables<'a>,
    end: usize,
}

impl Parser<'_> {
    fn dim(&self) -> usize {
        self.vars.dim()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn expr(&mut self) -> Result<SparsePolynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(tok: Option<&Tok>) -> bool {
        matches!(tok, Some(Tok::Num(..) | Tok::Ident(_) | Tok::LParen))
    }

    fn term(&mut self) -> Result<SparsePolynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.at += 1;
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    let divisor = rhs
                        .as_constant()
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| syntax(pos, "division is only allowed by a nonzero constant"))?;
                    let inv = Scalar::one().checked_div(&divisor).expect("nonzero divisor");
                    acc = acc.scale(&inv);
                }
                t if Self::starts_factor(t) => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SparsePolynomial, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<SparsePolynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.at += 1;
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(value, true)) => {
                self.at += 1;
                let e: u32 = value
                    .to_integer()
                    .try_into()
                    .map_err(|_| syntax(pos, "exponent too large"))?;
                if e > 10_000 {
                    return Err(syntax(pos, "exponent too large"));
                }
                Ok(base.pow(e))
            }
            _ => Err(syntax(pos, "exponent must be a non-negative integer literal")),
        }
    }

    fn atom(&mut self) -> Result<SparsePolynomial, ParseError> {
        let pos = self.pos();
        let dim = self.dim();
        match self.peek().cloned() {
            Some(Tok::Num(value, _)) => {
                self.at += 1;
                Ok(SparsePolynomial::constant(dim, Scalar::from_rational(value)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "i" {
                    return Ok(SparsePolynomial::constant(dim, Scalar::i()));
                }
                let index = self.resolve(&name, pos)?;
                Ok(SparsePolynomial::monomial(
                    ExponentTuple::unit(dim, index),
                    Scalar::one(),
                ))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(syntax(self.pos(), "expected ')'"));
                }
                self.at += 1;
                Ok(inner)
            }
            Some(tok) => Err(syntax(pos, format!("unexpected token {tok:?}"))),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }

    fn resolve(&self, name: &str, position: usize) -> Result<usize, ParseError> {
        match self.vars {
            Variables::Indexed { dim } => {
                let index: usize = name
                    .strip_prefix('z')
                    .filter(|d| !d.is_empty())
                    .and_then(|d| d.parse().ok())
                    .filter(|&k: &usize| k >= 1)
                    .ok_or_else(|| syntax(position, format!("unknown identifier {name:?}")))?;
                if index > dim {
                    return Err(ParseError::VariableOutOfRange {
                        name: name.to_string(),
                        position,
                        dim,
                    });
                }
                Ok(index - 1)
            }
            Variables::Named(names) => names
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| syntax(position, format!("unknown identifier {name:?}"))),
        }
    }
}

/// Parses any expression, including constants and the zero polynomial.
pub fn parse_expression(text: &str, vars: Variables<'_>) -> Result<SparsePolynomial, ParseError> {
    let toks = lex(text)?;
    let end = text.chars().count();
    let mut parser = Parser { toks, at: 0, vars, end };
    let poly = parser.expr()?;
    if parser.at != parser.toks.len() {
        return Err(syntax(parser.pos(), "unexpected trailing input"));
    }
    Ok(poly)
}

/// Parses a polynomial in `z1 … zn`; the identically zero polynomial is rejected.
pub fn parse_poly(text: &str, n: usize) -> Result<SparsePolynomial, ParseError> {
    let poly = parse_expression(text, Variables::Indexed { dim: n })?;
    if poly.is_zero() {
        return Err(ParseError::ZeroPolynomial);
    }
    Ok(poly)
}

/// Parses a comma-separated list of constants, e.g. `1, 1/2+i, 0`.
pub fn parse_point(text: &str) -> Result<Vec<Scalar>, ParseError> {
    let mut offset = 0;
    let mut out = Vec::new();
    for part in text.split(',') {
        let value = parse_expression(part, Variables::Indexed { dim: 0 }).map_err(|e| match e {
            ParseError::Syntax { position, message } => ParseError::Syntax {
                position: position + offset,
                message,
            },
            other => other,
        })?;
        out.push(value.as_constant().unwrap_or_else(Scalar::zero));
        offset += part.chars().count() + 1;
    }
    Ok(out)
}
