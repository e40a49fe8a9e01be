use num_complex::Complex;
use thiserror::Error;

use super::{Expr, Var};
use crate::scalar::{cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    NonIntegerExponent,
}

/// Parse failure; `offset` is a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        Self { kind: ParseErrorKind::Syntax, offset, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, imag: bool, integral: Option<u32> },
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    at: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut plain = true;
            if i < bytes.len() && bytes[i] == b'.' {
                plain = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    plain = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::syntax(start, format!("malformed number `{text}`")))?;
            let integral = if plain { text.parse::<u32>().ok() } else { None };
            let imag = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
            if imag {
                i += 1;
            }
            out.push(Token { tok: Tok::Num { value, imag, integral }, at: start });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), at: start });
        } else if b"+-*/^()".contains(&c) {
            i += 1;
            out.push(Token { tok: Tok::Op(c as char), at: start });
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError::syntax(start, format!("unexpected character `{ch}`")));
        }
    }
    out.push(Token { tok: Tok::End, at: src.len() });
    Ok(out)
}

fn check_parens(tokens: &[Token], end: usize) -> Result<(), ParseError> {
    let mut depth = 0usize;
    for t in tokens {
        match t.tok {
            Tok::Op('(') => depth += 1,
            Tok::Op(')') => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| ParseError::syntax(t.at, "unmatched `)`"))?;
            }
            _ => {}
        }
    }
    if depth > 0 {
        return Err(ParseError::syntax(end, "unexpected end of input, missing `)`"));
    }
    Ok(())
}

struct Parser<'a, T> {
    tokens: &'a [Token],
    pos: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real> Parser<'_, T> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok == Tok::Op(op) {
            Ok(())
        } else {
            Err(ParseError::syntax(t.at, format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr<T>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr<T>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr<T>, ParseError> {
        match self.peek().tok {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr<T>, ParseError> {
        let mut base = self.primary()?;
        while self.peek().tok == Tok::Op('^') {
            self.bump();
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let t = self.bump();
        let non_integer = |at| ParseError {
            kind: ParseErrorKind::NonIntegerExponent,
            offset: at,
            message: "exponent must be a nonnegative integer literal".into(),
        };
        match t.tok {
            Tok::Num { integral: Some(n), imag: false, .. } => Ok(n),
            Tok::Num { .. } | Tok::Ident(_) | Tok::Op('-') => Err(non_integer(t.at)),
            Tok::Op('(') => {
                let n = self.exponent()?;
                self.expect(')')?;
                Ok(n)
            }
            Tok::End => Err(ParseError::syntax(t.at, "unexpected end of input")),
            Tok::Op(c) => Err(ParseError::syntax(t.at, format!("unexpected `{c}`"))),
        }
    }

    fn primary(&mut self) -> Result<Expr<T>, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num { value, imag, .. } => {
                let v = T::from_f64(value).ok_or_else(|| ParseError::syntax(t.at, "number out of range"))?;
                Ok(Expr::Const(if imag { cplx(T::zero(), v) } else { cplx(v, T::zero()) }))
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var(Var::T)),
                "x" => Ok(Expr::Var(Var::X)),
                "u" => Ok(Expr::Var(Var::U)),
                "v" => Ok(Expr::Var(Var::V)),
                "i" => Ok(Expr::Const(Complex::i())),
                "pi" => Ok(Expr::Const(cplx(T::PI(), T::zero()))),
                "exp" | "log" => {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(if name == "exp" { Expr::Exp(Box::new(arg)) } else { Expr::Log(Box::new(arg)) })
                }
                _ => Err(ParseError {
                    kind: ParseErrorKind::UnknownIdentifier,
                    offset: t.at,
                    message: format!("unknown identifier `{name}`"),
                }),
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(ParseError::syntax(t.at, "unexpected end of input")),
            Tok::Op(c) => Err(ParseError::syntax(t.at, format!("unexpected `{c}`"))),
        }
    }
}

/// Parses a right-hand side. See the module docs for the grammar.
pub fn parse<T: Real>(src: &str) -> Result<Expr<T>, ParseError> {
    let tokens = lex(src)?;
    check_parens(&tokens, src.len())?;
    let mut p = Parser::<T> { tokens: &tokens, pos: 0, _marker: std::marker::PhantomData };
    let e = p.expr()?;
    let rest = p.peek();
    if rest.tok != Tok::End {
        return Err(ParseError::syntax(rest.at, "trailing input"));
    }
    Ok(e)
}

impl<T: Real> std::str::FromStr for Expr<T> {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
