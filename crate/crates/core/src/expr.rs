//! Closed-form scalar expressions in `t`, `x` and `u`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := unary                      (must fold to a constant)
//! atom     := number | 't' | 'x' | 'u'
//!           | ('exp' | 'ln' | 'abs' | 'sqrt') '(' expr ')'
//!           | ('min' | 'max') '(' expr ',' expr ')'
//!           | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-t^2` is `-(t^2)`, and it is
//! right-associative. Exponents are folded to a real constant at parse time.
//! `sqrt(e)` is stored as `e^0.5`. There is no implicit multiplication.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
    U,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::U => "u",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func2 {
    Min,
    Max,
}

/// Expression tree. Power nodes always carry a constant real exponent.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
    Call2(Func2, Box<Expr>, Box<Expr>),
}

/// Variable bindings for [`Expr::eval`]. Unset variables are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub t: Option<f64>,
    pub x: Option<f64>,
    pub u: Option<f64>,
}

impl Env {
    pub fn t(t: f64) -> Self {
        Env {
            t: Some(t),
            ..Env::default()
        }
    }

    pub fn u(u: f64) -> Self {
        Env {
            u: Some(u),
            ..Env::default()
        }
    }

    pub fn tx(t: f64, x: f64) -> Self {
        Env {
            t: Some(t),
            x: Some(x),
            u: None,
        }
    }

    fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::T => self.t,
            Var::X => self.x,
            Var::U => self.u,
        }
    }
}

impl Expr {
    /// Parses `text`, accepting only the variables in `allowed`.
    pub fn parse(text: &str, allowed: &[Var]) -> Result<Expr> {
        if text.trim().is_empty() {
            return Err(Error::Syntax {
                offset: 0,
                message: "empty expression".into(),
            });
        }
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            allowed,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }

    pub fn powf(base: Expr, e: f64) -> Expr {
        Expr::Pow(Box::new(base), e)
    }

    pub fn abs(e: Expr) -> Expr {
        Expr::Call(Func::Abs, Box::new(e))
    }

    /// `t^e * self`
    pub fn times_t_pow(self, e: f64) -> Expr {
        if e == 0.0 {
            return self;
        }
        Expr::mul(Expr::powf(Expr::Var(Var::T), e), self)
    }

    /// Evaluates the expression. Never returns a non-finite value; every
    /// singularity is reported as [`Error::Domain`].
    pub fn eval(&self, env: &Env) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => env.get(*v).ok_or_else(|| Error::Domain {
                expr: self.to_string(),
                value: f64::NAN,
                reason: "variable not bound",
            })?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval(env)?;
                let y = b.eval(env)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(self.domain(y, "division by zero"));
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(base, e) => {
                let b = base.eval(env)?;
                pow_checked(b, *e).map_err(|reason| self.domain(b, reason))?
            }
            Expr::Call(f, a) => {
                let x = a.eval(env)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(self.domain(x, "logarithm of a non-positive value"));
                        }
                        x.ln()
                    }
                    Func::Abs => x.abs(),
                }
            }
            Expr::Call2(f, a, b) => {
                let x = a.eval(env)?;
                let y = b.eval(env)?;
                match f {
                    Func2::Min => x.min(y),
                    Func2::Max => x.max(y),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain(v, "non-finite result"))
        }
    }

    pub fn eval_t(&self, t: f64) -> Result<f64> {
        self.eval(&Env::t(t))
    }

    pub fn eval_u(&self, u: f64) -> Result<f64> {
        self.eval(&Env::u(u))
    }

    pub fn eval_tx(&self, t: f64, x: f64) -> Result<f64> {
        self.eval(&Env::tx(t, x))
    }

    fn domain(&self, value: f64, reason: &'static str) -> Error {
        Error::Domain {
            expr: self.to_string(),
            value,
            reason,
        }
    }

    pub fn uses(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.uses(v),
            Expr::Binary(_, a, b) | Expr::Call2(_, a, b) => a.uses(v) || b.uses(v),
        }
    }

    pub fn is_constant(&self) -> bool {
        !(self.uses(Var::T) || self.uses(Var::X) || self.uses(Var::U))
    }

    /// Value of a variable-free expression.
    pub fn constant_value(&self) -> Option<f64> {
        if self.is_constant() {
            self.eval(&Env::default()).ok()
        } else {
            None
        }
    }

    /// Replaces every occurrence of `v` with `with`.
    pub fn substitute(&self, v: Var, with: &Expr) -> Expr {
        match self {
            Expr::Var(w) if *w == v => with.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(v, with))),
            Expr::Pow(e, k) => Expr::Pow(Box::new(e.substitute(v, with)), *k),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.substitute(v, with))),
            Expr::Binary(op, a, b) => Expr::Binary(
                *op,
                Box::new(a.substitute(v, with)),
                Box::new(b.substitute(v, with)),
            ),
            Expr::Call2(f, a, b) => Expr::Call2(
                *f,
                Box::new(a.substitute(v, with)),
                Box::new(b.substitute(v, with)),
            ),
        }
    }

    /// Recognises `c * v^k` (including `c`, `v`, `v^k`, `c*v`, `v^k/c`).
    /// Returns `(c, k)`.
    pub fn as_power_law(&self, v: Var) -> Option<(f64, f64)> {
        match self {
            Expr::Const(c) => Some((*c, 0.0)),
            Expr::Var(w) if *w == v => Some((1.0, 1.0)),
            Expr::Pow(base, e) => {
                let (c, k) = base.as_power_law(v)?;
                if c < 0.0 {
                    return None;
                }
                Some((c.powf(*e), k * e))
            }
            Expr::Neg(e) => {
                let (c, k) = e.as_power_law(v)?;
                Some((-c, k))
            }
            Expr::Binary(BinOp::Mul, a, b) => {
                let (c1, k1) = a.as_power_law(v)?;
                let (c2, k2) = b.as_power_law(v)?;
                Some((c1 * c2, k1 + k2))
            }
            Expr::Binary(BinOp::Div, a, b) => {
                let (c1, k1) = a.as_power_law(v)?;
                let (c2, k2) = b.as_power_law(v)?;
                if c2 == 0.0 {
                    return None;
                }
                Some((c1 / c2, k1 - k2))
            }
            _ => self.constant_value().map(|c| (c, 0.0)),
        }
    }
}

/// Real power with the conventions used throughout the crate:
/// `0^e = 0` for `e > 0`, `0^0 = 1`, `0^e` with `e < 0` is a singularity and a
/// negative base needs an integer exponent.
pub(crate) fn pow_checked(b: f64, e: f64) -> std::result::Result<f64, &'static str> {
    if b == 0.0 {
        if e > 0.0 {
            Ok(0.0)
        } else if e == 0.0 {
            Ok(1.0)
        } else {
            Err("zero raised to a negative power")
        }
    } else if b < 0.0 {
        if e.fract() == 0.0 {
            Ok(b.powf(e))
        } else {
            Err("negative base with non-integer exponent")
        }
    } else {
        Ok(b.powf(e))
    }
}

// Printing is fully parenthesised so that re-parsing reproduces the tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Pow(b, e) => {
                if *e < 0.0 {
                    write!(f, "({b})^(-{:?})", -e)
                } else {
                    write!(f, "({b})^({e:?})")
                }
            }
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Ln => "ln",
                    Func::Abs => "abs",
                };
                write!(f, "{name}({a})")
            }
            Expr::Call2(func, a, b) => {
                let name = match func {
                    Func2::Min => "min",
                    Func2::Max => "max",
                };
                write!(f, "{name}({a}, {b})")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    allowed: &'a [Var],
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
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

    fn term(&mut self) -> Result<Expr> {
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

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let start = self.pos;
        let exponent = self.unary()?;
        let k = fold_exponent(&exponent).map_err(|message| Error::Syntax {
            offset: start,
            message: message.into(),
        })?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        self.pos = i;
        Ok(Expr::Const(value))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let var = match name {
            "t" => Some(Var::T),
            "x" => Some(Var::X),
            "u" => Some(Var::U),
            _ => None,
        };
        if let Some(v) = var {
            if !self.allowed.contains(&v) {
                return Err(Error::UnknownVariable {
                    name: name.into(),
                    offset: start,
                });
            }
            return Ok(Expr::Var(v));
        }
        let unary = match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "abs" => Some(Func::Abs),
            _ => None,
        };
        if name == "sqrt" {
            self.expect(b'(')?;
            let a = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::Pow(Box::new(a), 0.5));
        }
        if let Some(f) = unary {
            self.expect(b'(')?;
            let a = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::Call(f, Box::new(a)));
        }
        let binary = match name {
            "min" => Some(Func2::Min),
            "max" => Some(Func2::Max),
            _ => None,
        };
        if let Some(f) = binary {
            self.expect(b'(')?;
            let a = self.expr()?;
            self.expect(b',')?;
            let b = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::Call2(f, Box::new(a), Box::new(b)));
        }
        Err(Error::UnknownVariable {
            name: name.into(),
            offset: start,
        })
    }
}

fn fold_exponent(e: &Expr) -> std::result::Result<f64, &'static str> {
    if !e.is_constant() {
        return Err("exponent must be a constant");
    }
    match e.eval(&Env::default()) {
        Ok(v) => Ok(v),
        Err(_) => Err("exponent does not evaluate to a finite constant"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T: &[Var] = &[Var::T];

    #[test]
    fn parse_and_eval_basic() {
        let e = Expr::parse("t^(-1/2) + 9*t^(1/2)", T).unwrap();
        assert_eq!(e.eval_t(1.0).unwrap(), 10.0);
        let e = Expr::parse("t^(-1/3)", T).unwrap();
        assert!((e.eval_t(8.0).unwrap() - 0.5).abs() < 1e-15);
        let l = Expr::parse("t^(-11/12)+t^(-5/6)", T).unwrap();
        assert_eq!(l.eval_t(1.0).unwrap(), 2.0);
    }

    #[test]
    fn omega_of_example_with_u() {
        let e = Expr::parse("u^(1/2)", &[Var::U]).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Var(Var::U)), 0.5));
        assert_eq!(e.eval_u(4.0).unwrap(), 2.0);
    }

    #[test]
    fn syntax_error_offset() {
        match Expr::parse("t +* 2", T) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(matches!(
            Expr::parse("2t", T),
            Err(Error::Syntax { offset: 1, .. })
        ));
    }

    #[test]
    fn unknown_variable_named() {
        match Expr::parse("t + y", T) {
            Err(Error::UnknownVariable { name, offset }) => {
                assert_eq!(name, "y");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Expr::parse("x", T),
            Err(Error::UnknownVariable { .. })
        ));
    }

    #[test]
    fn precedence() {
        let e = Expr::parse("-t^2", T).unwrap();
        assert_eq!(e.eval_t(3.0).unwrap(), -9.0);
        let e = Expr::parse("2^3^2", T).unwrap();
        assert_eq!(e.eval_t(0.0).unwrap(), 512.0);
        let e = Expr::parse("1 - 2 - 3", T).unwrap();
        assert_eq!(e.eval_t(0.0).unwrap(), -4.0);
        let e = Expr::parse("8 / 2 / 2 * 3", T).unwrap();
        assert_eq!(e.eval_t(0.0).unwrap(), 6.0);
        let e = Expr::parse("t^-1", T).unwrap();
        assert_eq!(e.eval_t(4.0).unwrap(), 0.25);
    }

    #[test]
    fn exponent_must_be_constant() {
        assert!(matches!(
            Expr::parse("t^t", T),
            Err(Error::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn domain_errors() {
        let e = Expr::parse("ln(t)", T).unwrap();
        assert!(matches!(e.eval_t(0.0), Err(Error::Domain { .. })));
        let e = Expr::parse("t^(-0.5)", T).unwrap();
        assert!(matches!(e.eval_t(0.0), Err(Error::Domain { .. })));
        let e = Expr::parse("t^(0.5)", T).unwrap();
        assert!(matches!(e.eval_t(-1.0), Err(Error::Domain { .. })));
        assert_eq!(e.eval_t(0.0).unwrap(), 0.0);
        let e = Expr::parse("t^2", T).unwrap();
        assert_eq!(e.eval_t(-3.0).unwrap(), 9.0);
        let e = Expr::parse("1/t", T).unwrap();
        assert!(e.eval_t(0.0).is_err());
        let e = Expr::parse("exp(t)", T).unwrap();
        assert!(e.eval_t(1e4).is_err());
    }

    #[test]
    fn functions() {
        let e = Expr::parse("min(abs(t), 2) + max(exp(0), sqrt(t*t))", T).unwrap();
        assert_eq!(e.eval_t(-3.0).unwrap(), 5.0);
        let e = Expr::parse("ln(1+x^(1/2))", &[Var::T, Var::X]).unwrap();
        assert!((e.eval_tx(1.0, 4.0).unwrap() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn power_law_detection() {
        let e = Expr::parse("3*t^(-1/3)", T).unwrap();
        let (c, k) = e.as_power_law(Var::T).unwrap();
        assert_eq!(c, 3.0);
        assert!((k + 1.0 / 3.0).abs() < 1e-15);
        let e = Expr::parse("u", &[Var::U]).unwrap();
        assert_eq!(e.as_power_law(Var::U), Some((1.0, 1.0)));
        let e = Expr::parse("u^(1/2)+u", &[Var::U]).unwrap();
        assert_eq!(e.as_power_law(Var::U), None);
        let e = Expr::parse("sqrt(u)/2", &[Var::U]).unwrap();
        assert_eq!(e.as_power_law(Var::U), Some((0.5, 0.5)));
    }

    #[test]
    fn substitution() {
        let f = Expr::parse("t^(-1/2)*x^2/(1+x) + t^(-3/4)", &[Var::T, Var::X]).unwrap();
        let f0 = f.substitute(Var::X, &Expr::Const(0.0));
        assert!(!f0.uses(Var::X));
        assert_eq!(f0.eval_t(1.0).unwrap(), 1.0);
    }

    #[test]
    fn eval_is_bit_deterministic() {
        let e = Expr::parse("exp(t)^(1/3) * ln(t + 2) - t^(-0.7)", T).unwrap();
        for i in 1..100 {
            let t = i as f64 * 0.137;
            assert_eq!(e.eval_t(t).unwrap().to_bits(), e.eval_t(t).unwrap().to_bits());
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Const),
            (0u32..1000).prop_map(|n| Expr::Const(n as f64)),
            Just(Expr::Var(Var::T)),
            Just(Expr::Var(Var::X)),
            Just(Expr::Var(Var::U)),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), inner.clone(), 0..4usize).prop_map(|(a, b, k)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k];
                    Expr::Binary(op, Box::new(a), Box::new(b))
                }),
                (inner.clone(), -5.0f64..5.0).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
                (inner.clone(), 0..3usize).prop_map(|(a, k)| {
                    let f = [Func::Exp, Func::Ln, Func::Abs][k];
                    Expr::Call(f, Box::new(a))
                }),
                (inner.clone(), inner, any::<bool>()).prop_map(|(a, b, m)| {
                    let f = if m { Func2::Min } else { Func2::Max };
                    Expr::Call2(f, Box::new(a), Box::new(b))
                }),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn print_parse_roundtrip(e in arb_expr()) {
            let all = [Var::T, Var::X, Var::U];
            let once = Expr::parse(&e.to_string(), &all).unwrap();
            prop_assert_eq!(&once, &e);
            let twice = Expr::parse(&once.to_string(), &all).unwrap();
            prop_assert_eq!(twice, once);
        }
    }
}
