//! A small expression language for real functions of one variable.
//!
//! Expressions are parsed from text into an immutable [`Expr`] tree and
//! evaluated at `f64` points. The grammar is fixed and closed:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' factor)?
//! base   := number | 'x' | '(' expr ')' | func '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp' | 'ln' | 'sqrt' | 'abs'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-x^2`
//! means `-(x^2)` and `2^3^2` means `2^(3^2)`.
//!
//! Evaluation either produces a finite `f64` or a [`EvalError`]; NaN and
//! infinite intermediates are promoted to errors immediately so they can
//! never leak into quadrature sums.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::quadrature::Interval;

/// Grid tolerance used by [`Expr::check_nonnegative`].
pub const NONNEG_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// AST of a real-valued function of the single variable `x`.
///
/// The tree is immutable after construction and evaluation is pure, so a
/// shared `Expr` can be evaluated from any number of threads.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

/// Parse failure, reported with the byte offset where it happened.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

/// Evaluation failure at a specific point `x`.
///
/// `NonFinite` covers NaN promotion and overflow to infinity from any
/// sub-expression.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("ln of non-positive argument while evaluating at x = {x}")]
    LnDomain { x: f64 },
    #[error("sqrt of negative argument while evaluating at x = {x}")]
    SqrtDomain { x: f64 },
    #[error("division by zero while evaluating at x = {x}")]
    DivByZero { x: f64 },
    #[error("zero raised to a negative power while evaluating at x = {x}")]
    ZeroToNegative { x: f64 },
    #[error("non-finite intermediate while evaluating at x = {x}")]
    NonFinite { x: f64 },
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser::new(text);
    let expr = parser.parse_expr()?;
    parser.skip_ws();
    if parser.pos < parser.bytes.len() {
        return Err(parser.unexpected("end of input"));
    }
    Ok(expr)
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        Expr::Const(value)
    }

    pub fn var() -> Self {
        Expr::Var
    }

    pub fn abs(self) -> Self {
        Expr::Unary(UnaryOp::Abs, Box::new(self))
    }

    pub fn sin(self) -> Self {
        Expr::Unary(UnaryOp::Sin, Box::new(self))
    }

    pub fn cos(self) -> Self {
        Expr::Unary(UnaryOp::Cos, Box::new(self))
    }

    pub fn exp(self) -> Self {
        Expr::Unary(UnaryOp::Exp, Box::new(self))
    }

    pub fn ln(self) -> Self {
        Expr::Unary(UnaryOp::Ln, Box::new(self))
    }

    pub fn sqrt(self) -> Self {
        Expr::Unary(UnaryOp::Sqrt, Box::new(self))
    }

    pub fn pow(self, exponent: Expr) -> Self {
        Expr::Binary(BinaryOp::Pow, Box::new(self), Box::new(exponent))
    }

    /// Evaluates the expression at `x` under IEEE double semantics.
    ///
    /// Returns a finite value or the domain error produced by the first
    /// offending sub-expression.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Unary(op, inner) => {
                let u = inner.eval(x)?;
                match op {
                    UnaryOp::Neg => -u,
                    UnaryOp::Abs => u.abs(),
                    UnaryOp::Sin => u.sin(),
                    UnaryOp::Cos => u.cos(),
                    UnaryOp::Exp => u.exp(),
                    UnaryOp::Ln => {
                        if u <= 0.0 {
                            return Err(EvalError::LnDomain { x });
                        }
                        u.ln()
                    }
                    UnaryOp::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::SqrtDomain { x });
                        }
                        u.sqrt()
                    }
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let l = lhs.eval(x)?;
                let r = rhs.eval(x)?;
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivByZero { x });
                        }
                        l / r
                    }
                    BinaryOp::Pow => {
                        if l == 0.0 && r < 0.0 {
                            return Err(EvalError::ZeroToNegative { x });
                        }
                        // powf already yields 0^0 = 1, the convention here.
                        l.powf(r)
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x })
        }
    }

    /// Probes nonnegativity on a uniform grid of `samples` points covering
    /// `interval`, endpoints included.
    ///
    /// This is a sampling probe, not a proof: it returns `true` when every
    /// sampled value is at least `-1e-12`. Evaluation errors propagate.
    pub fn check_nonnegative(
        &self,
        interval: &Interval,
        samples: usize,
    ) -> Result<bool, EvalError> {
        assert!(samples >= 2, "nonnegativity probe needs at least 2 samples");
        for x in interval.grid(samples) {
            if self.eval(x)? < -NONNEG_SLACK {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Unary(UnaryOp::Neg, Box::new(self))
    }
}

macro_rules! impl_binary_op {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::Binary($op, Box::new(self), Box::new(rhs))
            }
        }
    };
}

impl_binary_op!(Add, add, BinaryOp::Add);
impl_binary_op!(Sub, sub, BinaryOp::Sub);
impl_binary_op!(Mul, mul, BinaryOp::Mul);
impl_binary_op!(Div, div, BinaryOp::Div);

impl fmt::Display for Expr {
    /// Prints a fully parenthesized form that re-parses to an expression
    /// evaluating bit-identically at every point.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "({c})")
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var => write!(f, "x"),
            Expr::Unary(UnaryOp::Neg, inner) => write!(f, "(-{inner})"),
            Expr::Unary(op, inner) => {
                let name = match op {
                    UnaryOp::Abs => "abs",
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Exp => "exp",
                    UnaryOp::Ln => "ln",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({inner})")
            }
            Expr::Binary(op, lhs, rhs) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                };
                write!(f, "({lhs} {sym} {rhs})")
            }
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            bytes: src.as_bytes(),
            src,
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let found = match self.bytes.get(self.pos) {
            Some(&b) if b.is_ascii_graphic() => format!("`{}`", b as char),
            Some(&b) => format!("byte 0x{b:02x}"),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            offset: self.pos,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, byte: u8, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = lhs + self.parse_term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = lhs - self.parse_term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = lhs * self.parse_factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = lhs / self.parse_factor()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.parse_factor()?);
        }
        let base = self.parse_base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.parse_factor()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn parse_base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.expect(b')', "`)`")?;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.parse_number(),
            Some(b) if b.is_ascii_alphabetic() => self.parse_ident(),
            _ => Err(self.unexpected("a number, `x`, `(` or a function name")),
        }
    }

    fn parse_number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let mut saw_digit = false;
        while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
            saw_digit = true;
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                saw_digit = true;
                self.pos += 1;
            }
        }
        if !saw_digit {
            self.pos = start;
            return Err(self.unexpected("a digit"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // `2e` with no exponent digits: the `e` was not part of the
                // number after all; roll back and let the caller see it.
                self.pos = mark;
            }
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("invalid number literal `{text}`"),
        })?;
        if !value.is_finite() {
            return Err(ParseError::Syntax {
                offset: start,
                message: format!("number literal `{text}` overflows a double"),
            });
        }
        Ok(Expr::Const(value))
    }

    fn parse_ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(b) if b.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if name == "x" {
            return Ok(Expr::Var);
        }
        let op = match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            _ => {
                return Err(ParseError::UnknownIdentifier {
                    offset: start,
                    name: name.to_string(),
                })
            }
        };
        self.expect(b'(', "`(` after function name")?;
        let arg = self.parse_expr()?;
        self.expect(b')', "`)`")?;
        Ok(Expr::Unary(op, Box::new(arg)))
    }
}
