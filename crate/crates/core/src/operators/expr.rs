//! Tokenizer and scalar expressions shared by every literal.
//!
//! Expressions may mention the index variable `n`, the imaginary unit `i`,
//! `pi`, and the functions `sqrt`, `turn` (`e^{2πi·t}`) and `cis` (`e^{iθ}`).
//! Integers and decimals are exact; anything irrational drops to floats.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::OperatorError;
use crate::scalar::{rat_to_f64, Rational, Scalar, Turn};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
}

pub(crate) struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    src: String,
}

impl Lexer {
    pub fn new(src: &str) -> Result<Self, OperatorError> {
        let mut toks = Vec::new();
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                toks.push((Tok::Num(parse_decimal(&text).ok_or_else(|| {
                    OperatorError::Parse(format!("bad number `{text}`"))
                })?), start));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
            } else if "()[],:;=+-*/^".contains(c) {
                toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(OperatorError::Parse(format!(
                    "unexpected character `{c}` at offset {i} in `{src}`"
                )));
            }
        }
        Ok(Lexer {
            toks,
            pos: 0,
            src: src.to_string(),
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self, msg: &str) -> OperatorError {
        let at = self
            .toks
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.src.len());
        OperatorError::Parse(format!("{msg} at offset {at} in `{}`", self.src))
    }

    pub fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<(), OperatorError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    pub fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    pub fn expect_ident(&mut self) -> Result<String, OperatorError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.error("expected a name"))
            }
        }
    }

    /// `name =` keyword argument head.
    pub fn eat_key(&mut self, name: &str) -> bool {
        if self.is_ident(name) && self.peek_at(1) == Some(&Tok::Sym('=')) {
            self.pos += 2;
            true
        } else {
            false
        }
    }

    pub fn expect_natural(&mut self) -> Result<u64, OperatorError> {
        match self.next() {
            Some(Tok::Num(r)) if r.is_integer() && !r.is_negative() => r
                .to_integer()
                .to_u64()
                .ok_or_else(|| self.error("integer too large")),
            _ => {
                self.pos -= 1;
                Err(self.error("expected a natural number"))
            }
        }
    }

    pub fn expect_integer(&mut self) -> Result<i64, OperatorError> {
        let neg = self.eat_sym('-');
        let v = self.expect_natural()? as i64;
        Ok(if neg { -v } else { v })
    }

    pub fn finish(&self) -> Result<(), OperatorError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(num, den))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Scalar),
    Index,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Turn,
    Cis,
    Cos,
    Sin,
    /// Forces floating point, used when a run asks for float precision.
    Float,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, OperatorError> {
        let mut lx = Lexer::new(src)?;
        let e = parse_expr(&mut lx)?;
        lx.finish()?;
        Ok(e)
    }

    pub fn uses_index(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Index => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses_index(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.uses_index() || b.uses_index()
            }
        }
    }

    pub fn eval(&self, n: i64) -> Result<Scalar, OperatorError> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::Index => Scalar::int(n),
            Expr::Neg(a) => -&a.eval(n)?,
            Expr::Add(a, b) => &a.eval(n)? + &b.eval(n)?,
            Expr::Sub(a, b) => &a.eval(n)? - &b.eval(n)?,
            Expr::Mul(a, b) => &a.eval(n)? * &b.eval(n)?,
            Expr::Div(a, b) => {
                let d = b.eval(n)?;
                let inv = d
                    .recip()
                    .ok_or_else(|| OperatorError::Eval(format!("division by zero at n = {n}")))?;
                &a.eval(n)? * &inv
            }
            Expr::Pow(a, b) => pow(&a.eval(n)?, &b.eval(n)?, n)?,
            Expr::Call(f, a) => {
                let v = a.eval(n)?;
                match f {
                    Func::Sqrt => sqrt(&v, n)?,
                    Func::Turn => turn_of(&v, n)?,
                    Func::Cis => {
                        let t = real_f64(&v, n)?;
                        Scalar::cis(t)
                    }
                    Func::Cos => Scalar::float(real_f64(&v, n)?.cos(), 0.0),
                    Func::Sin => Scalar::float(real_f64(&v, n)?.sin(), 0.0),
                    Func::Float => v.to_float(),
                }
            }
        })
    }

    /// Evaluates an expression that must not depend on `n`.
    pub fn eval_const(&self) -> Result<Scalar, OperatorError> {
        if self.uses_index() {
            return Err(OperatorError::Parse("constant expected, found `n`".into()));
        }
        self.eval(0)
    }
}

fn real_f64(v: &Scalar, n: i64) -> Result<f64, OperatorError> {
    let c = v.to_c64();
    if c.im.abs() > 1e-12 * c.re.abs().max(1.0) {
        return Err(OperatorError::Eval(format!("real value expected at n = {n}, got {v}")));
    }
    Ok(c.re)
}

fn sqrt(v: &Scalar, n: i64) -> Result<Scalar, OperatorError> {
    if let Some(r) = v.as_rational() {
        if r.is_negative() {
            return Err(OperatorError::Eval(format!("sqrt of negative value at n = {n}")));
        }
        let (p, q) = (r.numer(), r.denom());
        let (sp, sq) = (p.sqrt(), q.sqrt());
        if &(&sp * &sp) == p && &(&sq * &sq) == q {
            return Ok(Scalar::real(Rational::new(sp, sq)));
        }
        return Ok(Scalar::float(rat_to_f64(r).sqrt(), 0.0));
    }
    let c = v.to_c64().sqrt();
    Ok(Scalar::float(c.re, c.im))
}

fn turn_of(v: &Scalar, n: i64) -> Result<Scalar, OperatorError> {
    if let Some(r) = v.as_rational() {
        if let (Some(p), Some(q)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Ok(Scalar::turn(Turn::new(p, q)));
        }
        // reduce the numerator first so that huge-but-reducible turns stay exact
        let reduced = Rational::new(r.numer() % r.denom(), r.denom().clone());
        if let (Some(p), Some(q)) = (reduced.numer().to_i64(), reduced.denom().to_i64()) {
            return Ok(Scalar::turn(Turn::new(p, q)));
        }
        return Ok(Scalar::cis(2.0 * std::f64::consts::PI * rat_to_f64(&reduced)));
    }
    let t = real_f64(v, n)?;
    Ok(Scalar::cis(2.0 * std::f64::consts::PI * t.rem_euclid(1.0)))
}

fn pow(base: &Scalar, exp: &Scalar, n: i64) -> Result<Scalar, OperatorError> {
    if let Some(e) = exp.as_rational().filter(|e| e.is_integer()) {
        let k = e
            .to_integer()
            .to_i64()
            .ok_or_else(|| OperatorError::Eval(format!("exponent too large at n = {n}")))?;
        let p = base.pow(k.unsigned_abs());
        return if k >= 0 {
            Ok(p)
        } else {
            p.recip()
                .ok_or_else(|| OperatorError::Eval(format!("zero to a negative power at n = {n}")))
        };
    }
    let e = real_f64(exp, n)?;
    let b = base.to_c64();
    let c = if b.im == 0.0 && b.re > 0.0 {
        num_complex::Complex::new(b.re.powf(e), 0.0)
    } else {
        b.powf(e)
    };
    Ok(Scalar::float(c.re, c.im))
}

pub(crate) fn parse_expr(lx: &mut Lexer) -> Result<Expr, OperatorError> {
    let mut lhs = parse_term(lx)?;
    loop {
        if lx.eat_sym('+') {
            lhs = Expr::Add(Box::new(lhs), Box::new(parse_term(lx)?));
        } else if lx.eat_sym('-') {
            lhs = Expr::Sub(Box::new(lhs), Box::new(parse_term(lx)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_term(lx: &mut Lexer) -> Result<Expr, OperatorError> {
    let mut lhs = parse_unary(lx)?;
    loop {
        if lx.eat_sym('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(parse_unary(lx)?));
        } else if lx.eat_sym('/') {
            lhs = Expr::Div(Box::new(lhs), Box::new(parse_unary(lx)?));
        } else if matches!(lx.peek(), Some(Tok::Ident(_))) || lx.is_sym('(') {
            // juxtaposition, as in `3/4 i` or `2n`
            lhs = Expr::Mul(Box::new(lhs), Box::new(parse_power(lx)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_unary(lx: &mut Lexer) -> Result<Expr, OperatorError> {
    if lx.eat_sym('-') {
        return Ok(Expr::Neg(Box::new(parse_unary(lx)?)));
    }
    if lx.eat_sym('+') {
        return parse_unary(lx);
    }
    parse_power(lx)
}

fn parse_power(lx: &mut Lexer) -> Result<Expr, OperatorError> {
    let base = parse_primary(lx)?;
    if lx.eat_sym('^') {
        return Ok(Expr::Pow(Box::new(base), Box::new(parse_unary(lx)?)));
    }
    Ok(base)
}

fn parse_primary(lx: &mut Lexer) -> Result<Expr, OperatorError> {
    match lx.next() {
        Some(Tok::Num(r)) => Ok(Expr::Const(Scalar::real(r))),
        Some(Tok::Sym('(')) => {
            let e = parse_expr(lx)?;
            lx.expect_sym(')')?;
            Ok(e)
        }
        Some(Tok::Ident(name)) => match name.as_str() {
            "n" => Ok(Expr::Index),
            "i" => Ok(Expr::Const(Scalar::imag_unit())),
            "pi" => Ok(Expr::Const(Scalar::float(std::f64::consts::PI, 0.0))),
            "sqrt" | "turn" | "cis" | "cos" | "sin" | "float" => {
                let f = match name.as_str() {
                    "sqrt" => Func::Sqrt,
                    "turn" => Func::Turn,
                    "cis" => Func::Cis,
                    "cos" => Func::Cos,
                    "sin" => Func::Sin,
                    _ => Func::Float,
                };
                lx.expect_sym('(')?;
                let e = parse_expr(lx)?;
                lx.expect_sym(')')?;
                Ok(Expr::Call(f, Box::new(e)))
            }
            _ => {
                lx.pos -= 1;
                Err(lx.error(&format!("unknown name `{name}`")))
            }
        },
        _ => {
            lx.pos = lx.pos.saturating_sub(1);
            Err(lx.error("expected a value"))
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                let s = c.literal();
                if s.contains(['+', '-', '/', ' ', '*']) {
                    write!(f, "({s})")
                } else {
                    f.write_str(&s)
                }
            }
            Expr::Index => f.write_str("n"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Pow(a, b) => write!(f, "{a}^{b}"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sqrt => "sqrt",
                    Func::Turn => "turn",
                    Func::Cis => "cis",
                    Func::Cos => "cos",
                    Func::Sin => "sin",
                    Func::Float => "float",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}
