//! A small expression language for user-defined torus-map lifts.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := unary ('^' factor)?            // '^' is right-associative
//! unary   := '-' unary | primary
//! primary := number | 'pi' | 'x' | 'y' | param | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'exp'
//! ```
//!
//! Parameters are substituted at parse time, so a compiled tree only ever
//! references the coordinates `x` and `y`. Differentiation is symbolic;
//! the one unsupported construct is `f ^ g` with a non-constant exponent.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident, // text recovered from the span
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Copy, Debug)]
struct Spanned {
    tok: Tok,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                out.push(Spanned {
                    tok,
                    start: i,
                    end: i + 1,
                });
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
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
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push(Spanned {
                    tok: Tok::Num(value),
                    start,
                    end: i,
                });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident,
                    start,
                    end: i,
                });
            }
            _ => {
                return Err(Error::Syntax {
                    offset: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Built-in unary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

/// Compiled expression tree. Binary nodes that can fault at evaluation time
/// carry the source offset of their operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Y,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Apply(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Y => y,
            Expr::Add(a, b) => a.eval(x, y)? + b.eval(x, y)?,
            Expr::Sub(a, b) => a.eval(x, y)? - b.eval(x, y)?,
            Expr::Mul(a, b) => a.eval(x, y)? * b.eval(x, y)?,
            Expr::Div(a, b, off) => {
                let den = b.eval(x, y)?;
                if den == 0.0 {
                    return Err(Error::EvalFault {
                        offset: *off,
                        message: "division by zero".into(),
                        x,
                        y,
                    });
                }
                a.eval(x, y)? / den
            }
            Expr::Pow(a, b, off) => {
                let v = a.eval(x, y)?.powf(b.eval(x, y)?);
                if !v.is_finite() {
                    return Err(Error::EvalFault {
                        offset: *off,
                        message: "non-finite power".into(),
                        x,
                        y,
                    });
                }
                v
            }
            Expr::Neg(a) => -a.eval(x, y)?,
            Expr::Apply(f, a) => f.apply(a.eval(x, y)?),
        };
        Ok(v)
    }

    /// Symbolic partial derivative with respect to `x` (`wrt_x`) or `y`.
    pub fn diff(&self, wrt_x: bool) -> Result<Expr> {
        let d = |e: &Expr| e.diff(wrt_x);
        Ok(match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::X => Expr::Const(if wrt_x { 1.0 } else { 0.0 }),
            Expr::Y => Expr::Const(if wrt_x { 0.0 } else { 1.0 }),
            Expr::Add(a, b) => add(d(a)?, d(b)?),
            Expr::Sub(a, b) => sub(d(a)?, d(b)?),
            Expr::Mul(a, b) => add(mul(d(a)?, (**b).clone()), mul((**a).clone(), d(b)?)),
            Expr::Div(a, b, off) => {
                // (a/b)' = (a' b - a b') / b^2
                let num = sub(mul(d(a)?, (**b).clone()), mul((**a).clone(), d(b)?));
                let den = mul((**b).clone(), (**b).clone());
                div(num, den, *off)
            }
            Expr::Pow(a, b, off) => match **b {
                Expr::Const(c) => {
                    // (a^c)' = c a^(c-1) a'
                    let body = Expr::Pow(a.clone(), Box::new(Expr::Const(c - 1.0)), *off);
                    mul(mul(Expr::Const(c), body), d(a)?)
                }
                _ => {
                    return Err(Error::NonDifferentiable {
                        offset: *off,
                        message: "power with non-constant exponent".into(),
                    })
                }
            },
            Expr::Neg(a) => neg(d(a)?),
            Expr::Apply(Func::Sin, a) => mul(Expr::Apply(Func::Cos, a.clone()), d(a)?),
            Expr::Apply(Func::Cos, a) => neg(mul(Expr::Apply(Func::Sin, a.clone()), d(a)?)),
            Expr::Apply(Func::Exp, a) => mul(Expr::Apply(Func::Exp, a.clone()), d(a)?),
        })
    }
}

// Smart constructors with constant folding; keeps derivative trees small.

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(c), _) if *c == 0.0 => b,
        (_, Expr::Const(c)) if *c == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (_, Expr::Const(c)) if *c == 0.0 => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(c), _) if *c == 0.0 => Expr::Const(0.0),
        (_, Expr::Const(c)) if *c == 0.0 => Expr::Const(0.0),
        (Expr::Const(c), _) if *c == 1.0 => b,
        (_, Expr::Const(c)) if *c == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr, off: usize) -> Expr {
    match (&a, &b) {
        (Expr::Const(c), _) if *c == 0.0 => Expr::Const(0.0),
        (_, Expr::Const(c)) if *c == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b), off),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        _ => Expr::Neg(Box::new(a)),
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
    params: &'a BTreeMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn eof_offset(&self) -> usize {
        self.src.len()
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).copied();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Spanned> {
        match self.bump() {
            Some(s) if s.tok == tok => Ok(s),
            Some(s) => Err(Error::Syntax {
                offset: s.start,
                message: format!("expected {what}"),
            }),
            None => Err(Error::Syntax {
                offset: self.eof_offset(),
                message: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn text(&self, s: &Spanned) -> &'a str {
        &self.src[s.start..s.end]
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(s) = self.peek().copied() {
            let op = match s.tok {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = if op { add(lhs, rhs) } else { sub(lhs, rhs) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(s) = self.peek().copied() {
            match s.tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = mul(lhs, rhs);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = div(lhs, rhs, s.start);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        // unary minus binds looser than '^', so -x^2 is -(x^2)
        if let Some(s) = self.peek().copied() {
            if s.tok == Tok::Minus {
                self.bump();
                return Ok(neg(self.factor()?));
            }
        }
        let base = self.primary()?;
        if let Some(s) = self.peek().copied() {
            if s.tok == Tok::Caret {
                self.bump();
                let exp = self.factor()?; // right-associative
                return Ok(match (&base, &exp) {
                    (Expr::Const(a), Expr::Const(b)) => Expr::Const(a.powf(*b)),
                    _ => Expr::Pow(Box::new(base), Box::new(exp), s.start),
                });
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let s = self.bump().ok_or_else(|| Error::Syntax {
            offset: self.eof_offset(),
            message: "expected expression, found end of input".into(),
        })?;
        match s.tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident => {
                let name = self.text(&s);
                let func = match name {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(t) if t.tok == Tok::Comma) {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    if args.len() != 1 {
                        return Err(Error::Arity {
                            name: f.name().into(),
                            expected: 1,
                            got: args.len(),
                            offset: s.start,
                        });
                    }
                    return Ok(Expr::Apply(f, Box::new(args.pop().unwrap())));
                }
                match name {
                    "x" => Ok(Expr::X),
                    "y" => Ok(Expr::Y),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    _ => match self.params.get(name) {
                        Some(v) => Ok(Expr::Const(*v)),
                        None => Err(Error::UnknownIdentifier {
                            name: name.into(),
                            offset: s.start,
                        }),
                    },
                }
            }
            _ => Err(Error::Syntax {
                offset: s.start,
                message: "expected a number, name, or `(`".into(),
            }),
        }
    }
}

/// Parse one coordinate expression, substituting `params` as constants.
pub fn parse_expr(src: &str, params: &BTreeMap<String, f64>) -> Result<Expr> {
    for (name, value) in params {
        if matches!(name.as_str(), "x" | "y" | "pi" | "sin" | "cos" | "exp") {
            return Err(Error::InvalidArgument(format!(
                "parameter name `{name}` shadows a reserved identifier"
            )));
        }
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "parameter `{name}` is not finite"
            )));
        }
    }
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        params,
    };
    let e = p.expr()?;
    if let Some(s) = p.peek() {
        return Err(Error::Syntax {
            offset: s.start,
            message: format!("unexpected trailing `{}`", p.text(s)),
        });
    }
    Ok(e)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::X => write!(f, "x"),
            Expr::Y => write!(f, "y"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b, _) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b, _) => write!(f, "({a} ^ {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Apply(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
