//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' INT)?
//! base   := IDENT | INT ('/' INT)? | 'i' | '(' expr ')' | '-' factor
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::gaussian::GaussianRational;
use crate::poly::MultiPoly;

pub const MAX_EXPONENT: u32 = 64;
/// Guards against `((x^64)^64)^64` style blow-ups.
pub const MAX_DEGREE: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Int,
    Slash,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    ImagUnit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprToken {
    pub kind: TokenKind,
    pub lexeme: String,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: expected {}, found {}", self.position, self.expected, self.found)
    }
}

impl ParseError {
    fn new(position: usize, expected: impl Into<String>, found: impl Into<String>) -> Self {
        Self { position, expected: expected.into(), found: found.into() }
    }
}

pub fn tokenize(input: &str) -> Result<Vec<ExprToken>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        if b.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let kind = match b {
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' => {
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                tokens.push(ExprToken { kind: TokenKind::Int, lexeme: input[start..pos].into(), position: start });
                continue;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                    pos += 1;
                }
                let lexeme = &input[start..pos];
                let kind = if lexeme == "i" { TokenKind::ImagUnit } else { TokenKind::Ident };
                tokens.push(ExprToken { kind, lexeme: lexeme.into(), position: start });
                continue;
            }
            _ => {
                let ch = input[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(start, "a token", format!("character {ch:?}")));
            }
        };
        pos += 1;
        tokens.push(ExprToken { kind, lexeme: input[start..pos].into(), position: start });
    }
    Ok(tokens)
}

fn valid_variable_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z')) && chars.all(|c| c.is_ascii_digit()) && name != "i"
}

/// Parses `input` as a polynomial in `variables`, in that order.
pub fn parse(input: &str, variables: &[&str]) -> Result<MultiPoly, ParseError> {
    if variables.is_empty() {
        return Err(ParseError::new(0, "at least one variable", "none"));
    }
    for (k, v) in variables.iter().enumerate() {
        if !valid_variable_name(v) {
            return Err(ParseError::new(0, "variable names matching [a-z][0-9]* other than i", format!("{v:?}")));
        }
        if variables[..k].contains(v) {
            return Err(ParseError::new(0, "distinct variable names", format!("duplicate {v:?}")));
        }
    }
    let tokens = tokenize(input)?;
    let mut p = Parser { tokens: &tokens, pos: 0, end: input.len(), vars: variables };
    let result = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(ParseError::new(tok.position, "an operator or end of input", describe(tok)));
    }
    Ok(result)
}

fn describe(tok: &ExprToken) -> String {
    format!("{:?} `{}`", tok.kind, tok.lexeme)
}

struct Parser<'a> {
    tokens: &'a [ExprToken],
    pos: usize,
    end: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a ExprToken> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn found(&self) -> String {
        self.peek().map_or_else(|| "end of input".to_string(), describe)
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'a ExprToken, ParseError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(ParseError::new(self.here(), what, self.found())),
        }
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(kind @ (TokenKind::Plus | TokenKind::Minus)) = self.peek_kind() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if kind == TokenKind::Plus { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let start = self.here();
        let mut acc = self.factor()?;
        while self.peek_kind() == Some(TokenKind::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            check_degree(start, acc.degree().unwrap_or(0) + rhs.degree().unwrap_or(0))?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        let start = self.here();
        let base = self.base()?;
        if self.peek_kind() != Some(TokenKind::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let tok = self.expect(TokenKind::Int, "a nonnegative integer exponent")?;
        let exp = tok.lexeme.parse::<u32>().ok().filter(|e| *e <= MAX_EXPONENT).ok_or_else(|| {
            ParseError::new(tok.position, format!("an exponent at most {MAX_EXPONENT}"), tok.lexeme.clone())
        })?;
        check_degree(start, base.degree().unwrap_or(0).saturating_mul(exp))?;
        Ok(base.pow(exp))
    }

    fn base(&mut self) -> Result<MultiPoly, ParseError> {
        let Some(tok) = self.peek() else {
            return Err(ParseError::new(self.end, "an operand", "end of input"));
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Ident => match self.vars.iter().position(|v| *v == tok.lexeme) {
                Some(j) => Ok(MultiPoly::var(self.nvars(), j)),
                None => Err(ParseError::new(
                    tok.position,
                    "a declared variable",
                    format!("unknown identifier `{}`", tok.lexeme),
                )),
            },
            TokenKind::ImagUnit => Ok(MultiPoly::constant(self.nvars(), GaussianRational::i())),
            TokenKind::Int => {
                let num: BigInt = tok.lexeme.parse().expect("digits");
                let mut den = BigInt::from(1);
                if self.peek_kind() == Some(TokenKind::Slash) {
                    self.pos += 1;
                    let d = self.expect(TokenKind::Int, "an integer denominator")?;
                    den = d.lexeme.parse().expect("digits");
                    if den.is_zero() {
                        return Err(ParseError::new(d.position, "a nonzero denominator", "0"));
                    }
                }
                let value = GaussianRational::real(BigRational::new(num, den));
                Ok(MultiPoly::constant(self.nvars(), value))
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Minus => Ok(-&self.factor()?),
            _ => Err(ParseError::new(tok.position, "an operand", describe(tok))),
        }
    }
}

fn check_degree(position: usize, degree: u32) -> Result<(), ParseError> {
    if degree > MAX_DEGREE {
        Err(ParseError::new(position, format!("total degree at most {MAX_DEGREE}"), format!("degree {degree}")))
    } else {
        Ok(())
    }
}
