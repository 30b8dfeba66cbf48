//! Scalar expressions over `x1 x2 x3 u s t`.
//!
//! Precedence from loose to tight: `+ -`, `* /`, unary `-`, `^`
//! (right-associative), atoms. Functions: `sin cos exp sqrt`; constant `pi`.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Chart coordinate `x1..x3` (stored zero-based).
    X(u8),
    U,
    S,
    T,
}

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
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Numbers the evaluator can run on: plain floats and forward-mode jets.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> {
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, e: Self) -> Self;

    fn powi(self, n: i32) -> Self {
        let mut r = Self::constant(1.0);
        let mut b = if n < 0 { Self::constant(1.0) / self } else { self };
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                r = r * b;
            }
            b = b * b;
            e >>= 1;
        }
        r
    }
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        math::sin(self)
    }
    fn cos(self) -> Self {
        math::cos(self)
    }
    fn exp(self) -> Self {
        math::exp(self)
    }
    fn sqrt(self) -> Self {
        math::sqrt(self)
    }
    fn ln(self) -> Self {
        math::ln(self)
    }
    fn powf(self, e: Self) -> Self {
        math::pow(self, e)
    }
}

/// Value plus `N` first partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    pub v: f64,
    pub d: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub fn variable(v: f64, k: usize) -> Self {
        let mut d = [0.0; N];
        d[k] = 1.0;
        Jet { v, d }
    }

    fn chain(self, v: f64, dv: f64) -> Self {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x *= dv;
        }
        Jet { v, d }
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for k in 0..N {
            self.d[k] += o.d[k];
        }
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        for k in 0..N {
            self.d[k] -= o.d[k];
        }
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = self.d[k] * o.v + self.v * o.d[k];
        }
        Jet { v: self.v * o.v, d }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let v = self.v / o.v;
        let mut d = [0.0; N];
        for k in 0..N {
            d[k] = (self.d[k] - v * o.d[k]) / o.v;
        }
        Jet { v, d }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.chain(-self.v, -1.0)
    }
}

impl<const N: usize> Scalar for Jet<N> {
    fn constant(v: f64) -> Self {
        Jet { v, d: [0.0; N] }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        self.chain(math::sin(self.v), math::cos(self.v))
    }
    fn cos(self) -> Self {
        self.chain(math::cos(self.v), -math::sin(self.v))
    }
    fn exp(self) -> Self {
        let e = math::exp(self.v);
        self.chain(e, e)
    }
    fn sqrt(self) -> Self {
        let r = math::sqrt(self.v);
        self.chain(r, 0.5 / r)
    }
    fn ln(self) -> Self {
        self.chain(math::ln(self.v), 1.0 / self.v)
    }
    fn powf(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }
}

/// Variable bindings for evaluation.
#[derive(Clone, Copy, Debug)]
pub struct Env<T> {
    pub x: [T; 3],
    pub u: T,
    pub s: T,
    pub t: T,
}

impl<T: Scalar> Env<T> {
    pub fn zero() -> Self {
        let z = T::constant(0.0);
        Env { x: [z; 3], u: z, s: z, t: z }
    }
}

impl Env<f64> {
    pub fn at_point(p: &[f64; 3]) -> Self {
        Env { x: *p, ..Self::zero() }
    }
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    pub fn eval<T: Scalar>(&self, env: &Env<T>) -> T {
        match self {
            Expr::Num(v) => T::constant(*v),
            Expr::Pi => T::constant(math::PI),
            Expr::Var(Var::X(i)) => env.x[*i as usize],
            Expr::Var(Var::U) => env.u,
            Expr::Var(Var::S) => env.s,
            Expr::Var(Var::T) => env.t,
            Expr::Neg(a) => -a.eval(env),
            Expr::Bin(op, a, b) => {
                let l = a.eval(env);
                match op {
                    BinOp::Add => l + b.eval(env),
                    BinOp::Sub => l - b.eval(env),
                    BinOp::Mul => l * b.eval(env),
                    BinOp::Div => l / b.eval(env),
                    BinOp::Pow => match **b {
                        Expr::Num(n) if n == math::floor(n) && n.abs() <= 64.0 => l.powi(n as i32),
                        _ => l.powf(b.eval(env)),
                    },
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval(env);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    /// Evaluate at a chart point.
    pub fn at(&self, p: &[f64; 3]) -> f64 {
        self.eval(&Env::at_point(p))
    }

    /// Every variable that occurs.
    pub fn visit_vars(&self, f: &mut dyn FnMut(Var)) {
        match self {
            Expr::Var(v) => f(*v),
            Expr::Neg(a) | Expr::Call(_, a) => a.visit_vars(f),
            Expr::Bin(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Expr::Num(_) | Expr::Pi => {}
        }
    }

    /// Reject variables outside `allowed`.
    pub fn check_vars(&self, allowed: &[Var]) -> Result<()> {
        let mut bad = None;
        self.visit_vars(&mut |v| {
            if !allowed.contains(&v) && bad.is_none() {
                bad = Some(v);
            }
        });
        match bad {
            None => Ok(()),
            Some(v) => Err(Error::UnknownIdentifier { name: var_name(v), offset: 0 }),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn var_name(v: Var) -> String {
    match v {
        Var::X(i) => alloc::format!("x{}", i + 1),
        Var::U => "u".to_string(),
        Var::S => "s".to_string(),
        Var::T => "t".to_string(),
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.prec() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => f.write_str(&var_name(*v)),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                if *op == BinOp::Pow {
                    write_child(f, a, 5)?;
                    f.write_str("^")?;
                    write_child(f, b, 3)
                } else {
                    write_child(f, a, p)?;
                    write!(f, " {sym} ")?;
                    write_child(f, b, p + 1)
                }
            }
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Exp => "exp",
                    Func::Sqrt => "sqrt",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax { offset: self.pos, message: message.to_string() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => self.err("unexpected character"),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let mut any = digits(&mut p);
        if p < s.len() && s[p] == b'.' {
            p += 1;
            any |= digits(&mut p);
        }
        if !any {
            return self.err("malformed number");
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        let text = core::str::from_utf8(&s[start..p]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos = p;
                Ok(Expr::Num(v))
            }
            Err(_) => self.err("malformed number"),
        }
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let func = match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        };
        if let Some(func) = func {
            if self.peek() != Some(b'(') {
                return self.err("expected `(` after function name");
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return self.err("expected `)`");
            }
            self.pos += 1;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        let var = match name {
            "pi" => return Ok(Expr::Pi),
            "x1" => Var::X(0),
            "x2" => Var::X(1),
            "x3" => Var::X(2),
            "u" => Var::U,
            "s" => Var::S,
            "t" => Var::T,
            _ => return Err(Error::UnknownIdentifier { name: name.to_string(), offset: start }),
        };
        Ok(Expr::Var(var))
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}
