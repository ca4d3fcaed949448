//! A minimal arithmetic expression language for coefficient entries.
//!
//! Grammar (usual precedence, `^` binds tighter than unary minus and is
//! right-associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | xi<k> | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp
//! ```
//!
//! Variables are `xi1 .. xip` (1-based in the source, 0-based in [`Expr::Var`]).

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    fn lookup(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// `ξ_{i+1}`.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        Expr::Const(value)
    }

    /// Evaluates at `ξ`. Division by an exact zero and non-finite results are
    /// errors.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *xi.get(*i).ok_or_else(|| {
                Error::DimensionMismatch(format!("xi{} requested but only {} coordinates given", i + 1, xi.len()))
            })?,
            Expr::Neg(e) => -e.eval(xi)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(xi)?;
                let b = b.eval(xi)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => math::pow(a, b),
                }
            }
            Expr::Call(f, arg) => {
                let x = arg.eval(xi)?;
                match f {
                    Func::Sin => math::sin(x),
                    Func::Cos => math::cos(x),
                    Func::Exp => math::exp(x),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("`{self}` evaluates to {v}")))
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) | Expr::Call(_, e) => e.max_var(),
            Expr::Binary(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Value of a variable-free expression.
    pub fn constant_value(&self) -> Option<f64> {
        if self.max_var().is_some() {
            return None;
        }
        self.eval(&[]).ok()
    }

    /// `Σ cᵢ eᵢ`, folding constants and dropping zero coefficients.
    pub fn linear_combination(terms: &[(f64, &Expr)]) -> Expr {
        let mut constant = 0.0;
        let mut out: Option<Expr> = None;
        for &(c, e) in terms {
            if c == 0.0 {
                continue;
            }
            if let Some(v) = e.constant_value() {
                constant += c * v;
                continue;
            }
            let term = if c == 1.0 {
                e.clone()
            } else {
                Expr::Binary(BinOp::Mul, Box::new(Expr::Const(c)), Box::new(e.clone()))
            };
            out = Some(match out {
                None => term,
                Some(acc) => Expr::Binary(BinOp::Add, Box::new(acc), Box::new(term)),
            });
        }
        match out {
            None => Expr::Const(constant),
            Some(e) if constant == 0.0 => e,
            Some(e) => Expr::Binary(BinOp::Add, Box::new(e), Box::new(Expr::Const(constant))),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized form that reparses to an equivalent expression.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => write!(f, "({c:?})"),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "xi{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b',' => Token::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((Token::Number(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Token::End, src.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    max_vars: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Token::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Token::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, offset) = self.bump();
        match tok {
            Token::Number(v) => Ok(Expr::Const(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(e)
            }
            Token::Ident(name) => {
                if *self.peek() == Token::LParen {
                    let func = Func::lookup(&name).ok_or_else(|| Error::UnknownIdentifier {
                        name: name.clone(),
                        offset,
                    })?;
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Token::RParen {
                        args.push(self.expr()?);
                        while *self.peek() == Token::Comma {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(Token::RParen, "`)` after function arguments")?;
                    if args.len() != 1 {
                        return Err(Error::Arity {
                            name,
                            expected: 1,
                            found: args.len(),
                        });
                    }
                    let arg = args.pop().expect("one argument");
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                self.variable(&name, offset)
            }
            Token::End => Err(Error::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
            _ => Err(Error::Syntax {
                offset,
                message: "expected a number, variable, function or `(`".into(),
            }),
        }
    }

    fn variable(&self, name: &str, offset: usize) -> Result<Expr> {
        let unknown = || Error::UnknownIdentifier {
            name: name.to_string(),
            offset,
        };
        let digits = name.strip_prefix("xi").ok_or_else(unknown)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(unknown());
        }
        let k: usize = digits.parse().map_err(|_| unknown())?;
        if k > self.max_vars {
            return Err(unknown());
        }
        Ok(Expr::Var(k - 1))
    }
}

/// Parses an expression over `xi1 .. xi{max_vars}`.
pub fn parse_expr(src: &str, max_vars: usize) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        max_vars,
    };
    let e = p.expr()?;
    if *p.peek() != Token::End {
        return Err(Error::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}
