//! Expression language for right-hand sides and exact solutions.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;             (* right-associative *)
//! atom    = number | "x" | "pi" | "e"
//!         | func "(" expr ")" | "(" expr ")" ;
//! func    = "exp" | "sin" | "cos" | "tan" | "log" | "sqrt" | "abs" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use std::fmt;

use thiserror::Error;

/// Functions available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Tan,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Pi,
    E,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Apply(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} in `{expr}`")]
pub struct EvalError {
    pub message: String,
    pub expr: String,
}

impl EvalError {
    pub fn new(message: impl Into<String>, expr: impl Into<String>) -> Self {
        EvalError {
            message: message.into(),
            expr: expr.into(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: offset.min(self.src.len().saturating_sub(1)),
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = match self.peek() {
            None => return self.error(self.src.len(), "unexpected end of input"),
            Some(_) => self.pos,
        };
        let c = self.bytes[start];
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            if !self.eat(b')') {
                return self.error(start, "unbalanced parenthesis");
            }
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.bytes.len()
                && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = &self.src[start..self.pos];
            return match name {
                "x" => Ok(Expr::Var),
                "pi" => Ok(Expr::Pi),
                "e" => Ok(Expr::E),
                _ => match Func::from_name(name) {
                    Some(f) => {
                        let open = self.pos;
                        if !self.eat(b'(') {
                            return self.error(open, format!("expected '(' after `{name}`"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return self.error(open, "unbalanced parenthesis");
                        }
                        Ok(Expr::Apply(f, Box::new(arg)))
                    }
                    None => self.error(start, format!("unknown identifier `{name}`")),
                },
            };
        }
        if c == b')' {
            return self.error(start, "unbalanced parenthesis");
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        self.error(start, format!("unexpected character `{ch}`"))
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            let s = p.pos;
            while p.pos < p.bytes.len() && p.bytes[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return self.error(start, "malformed number");
        }
        // Only treat `e` as an exponent marker when digits follow it; a bare
        // `e` after a number is left for the caller (and is trailing input).
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            _ => self.error(start, format!("malformed number `{text}`")),
        }
    }
}

/// Parses an expression in `x`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        src,
        bytes: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        let msg = if c == b')' {
            "unbalanced parenthesis".to_string()
        } else {
            "trailing input".to_string()
        };
        return p.error(p.pos, msg);
    }
    Ok(e)
}

impl Expr {
    /// Evaluates at `x`; any non-finite intermediate is an error naming the
    /// failing sub-expression.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Pi => std::f64::consts::PI,
            Expr::E => std::f64::consts::E,
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Binary(op, a, b) => {
                let l = a.eval(x)?;
                let r = b.eval(x)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::new("division by zero", self.to_string()));
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        if l < 0.0 && r.fract() != 0.0 {
                            return Err(EvalError::new(
                                "non-integer power of a negative number",
                                self.to_string(),
                            ));
                        }
                        l.powf(r)
                    }
                }
            }
            Expr::Apply(f, a) => {
                let v = a.eval(x)?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.tan(),
                    Func::Abs => v.abs(),
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(EvalError::new(
                                "logarithm of a non-positive number",
                                self.to_string(),
                            ));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(EvalError::new(
                                "square root of a negative number",
                                self.to_string(),
                            ));
                        }
                        v.sqrt()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(EvalError::new("non-finite result", self.to_string()));
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

/// Evaluates `e` at `x`.
pub fn eval_expr(e: &Expr, x: f64) -> Result<f64, EvalError> {
    e.eval(x)
}

/// Fully parenthesised where needed; the output re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => write!(f, "x"),
            Expr::Pi => write!(f, "pi"),
            Expr::E => write!(f, "e"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Apply(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                if *op == BinOp::Pow {
                    // base must be an atom; the exponent may be unary or power
                    wrap(f, a, a.precedence() <= p)?;
                    write!(f, "^")?;
                    wrap(f, b, b.precedence() < 3)
                } else {
                    wrap(f, a, a.precedence() < p)?;
                    write!(f, " {} ", op.symbol())?;
                    // left-associative: equal precedence on the right needs parens
                    wrap(f, b, b.precedence() <= p)
                }
            }
        }
    }
}
