//! A small arithmetic language for right-hand sides `f(t, z_0, …, z_m)`.
//!
//! Variables are `t`, `x` (the state, `z_0`) and `d1`..`dm` (the fractional
//! derivative arguments `z_1..z_m`). Operators are `+ - * / ^` and unary
//! minus; `^` binds tightest and is right-associative, unary minus binds
//! tighter than `*` and `/`. Functions: `sin cos exp ln sqrt abs gamma`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ExprError;
use crate::kernel::gamma_fn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Time,
    /// `z_i`: `x` for `i = 0`, `d{i}` otherwise.
    State(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Gamma,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "gamma" => Func::Gamma,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Gamma => "gamma",
        }
    }

    fn apply(self, v: f64) -> Result<f64, ExprError> {
        match self {
            Func::Sin => Ok(v.sin()),
            Func::Cos => Ok(v.cos()),
            Func::Exp => Ok(v.exp()),
            Func::Ln if v <= 0.0 => Err(ExprError::Eval(format!("ln of nonpositive value {v}"))),
            Func::Ln => Ok(v.ln()),
            Func::Sqrt if v < 0.0 => Err(ExprError::Eval(format!("sqrt of negative value {v}"))),
            Func::Sqrt => Ok(v.sqrt()),
            Func::Abs => Ok(v.abs()),
            Func::Gamma => gamma_fn(v).map_err(|e| ExprError::Eval(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, t: f64, z: &[f64]) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::Time) => t,
            Expr::Var(Var::State(i)) => *z.get(*i).ok_or(ExprError::ArgumentCount {
                expected: i + 1,
                got: z.len(),
            })?,
            Expr::Neg(e) => -e.eval(t, z)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(t, z)?;
                let b = b.eval(t, z)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => {
                        return Err(ExprError::Eval("division by zero".into()))
                    }
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(t, z)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Eval(format!("non-finite value from `{self}`")))
        }
    }

    /// Largest state index referenced, if any.
    pub fn max_state_index(&self) -> Option<usize> {
        match self {
            Expr::Num(_) | Expr::Var(Var::Time) => None,
            Expr::Var(Var::State(i)) => Some(*i),
            Expr::Neg(e) | Expr::Call(_, e) => e.max_state_index(),
            Expr::Binary(_, a, b) => match (a.max_state_index(), b.max_state_index()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::Time) => f.write_str("t"),
            Expr::Var(Var::State(0)) => f.write_str("x"),
            Expr::Var(Var::State(i)) => write!(f, "d{i}"),
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
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (at, tok) = lx.next()?;
            let end = tok == Tok::End;
            out.push((at, tok));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(usize, Tok), ExprError> {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => self.number()?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok((start, tok))
    }

    fn number(&mut self) -> Result<Tok, ExprError> {
        let start = self.pos;
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut count = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(ExprError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(ExprError::Syntax {
                    offset: mark,
                    message: "malformed exponent".into(),
                });
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })
    }
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    arity: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(ExprError::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let (at, tok) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(at, name),
            Tok::End => Err(ExprError::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
            other => Err(ExprError::Syntax {
                offset: at,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn identifier(&mut self, at: usize, name: String) -> Result<Expr, ExprError> {
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, "`(` after function name")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        match name.as_str() {
            "t" => return Ok(Expr::Var(Var::Time)),
            "x" => return Ok(Expr::Var(Var::State(0))),
            _ => {}
        }
        let index = name
            .strip_prefix('d')
            .filter(|rest| !rest.is_empty() && !rest.starts_with('0'))
            .and_then(|rest| rest.parse::<usize>().ok());
        match index {
            Some(index) if index <= self.arity => Ok(Expr::Var(Var::State(index))),
            Some(index) => Err(ExprError::ArityExceeded {
                offset: at,
                index,
                arity: self.arity,
            }),
            None => Err(ExprError::UnknownIdentifier { offset: at, name }),
        }
    }
}

/// Parse `src` for a right-hand side of arity `m` (variables `d1..dm`).
pub fn parse(src: &str, arity: usize) -> Result<Expr, ExprError> {
    let tokens = Lexer::tokens(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        arity,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ExprError::Syntax {
            offset: p.offset(),
            message: "trailing input".into(),
        });
    }
    Ok(e)
}

/// A parsed right-hand side `f(t, z_0, …, z_m)` together with its arity `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsFunction {
    expr: Expr,
    arity: usize,
}

impl RhsFunction {
    pub fn new(expr: Expr, arity: usize) -> Result<Self, ExprError> {
        if let Some(i) = expr.max_state_index() {
            if i > arity {
                return Err(ExprError::ArityExceeded {
                    offset: 0,
                    index: i,
                    arity,
                });
            }
        }
        Ok(Self { expr, arity })
    }

    pub fn parse(src: &str, arity: usize) -> Result<Self, ExprError> {
        Ok(Self {
            expr: parse(src, arity)?,
            arity,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// True when `f` does not read any state argument.
    pub fn is_state_free(&self) -> bool {
        self.expr.max_state_index().is_none()
    }

    /// `f(t, z)` with `z.len() == m + 1`.
    pub fn eval(&self, t: f64, z: &[f64]) -> Result<f64, ExprError> {
        if z.len() != self.arity + 1 {
            return Err(ExprError::ArgumentCount {
                expected: self.arity + 1,
                got: z.len(),
            });
        }
        self.expr.eval(t, z)
    }
}

impl fmt::Display for RhsFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

/// Sampling region for [`lipschitz_probe`]: a time interval and one interval
/// per state argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeBox {
    pub time: (f64, f64),
    pub state: Vec<(f64, f64)>,
}

impl ProbeBox {
    /// The same interval for every one of the `m + 1` state arguments.
    pub fn uniform(time: (f64, f64), arity: usize, interval: (f64, f64)) -> Self {
        Self {
            time,
            state: vec![interval; arity + 1],
        }
    }
}

const PROBE_SEED: u64 = 0x5eed_f00d_cafe_0001;

/// Empirical Lipschitz constant of `f` in the state arguments under the
/// metric `Σ|Δz_i|`.
///
/// Each sample draws a random time and two random state vectors, plus a pair
/// differing in a single coordinate. The maximum ratio `|Δf| / Σ|Δz_i|` is
/// returned; it is a lower bound on the true constant. Samples where `f`
/// faults are skipped.
pub fn lipschitz_probe(f: &RhsFunction, region: &ProbeBox, samples: usize) -> f64 {
    let dim = f.arity + 1;
    assert_eq!(region.state.len(), dim, "probe box dimension mismatch");
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let draw = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| {
        if hi > lo {
            rng.random_range(lo..=hi)
        } else {
            lo
        }
    };
    let mut best = 0.0_f64;
    let mut ratio = |t: f64, a: &[f64], b: &[f64]| {
        let dz: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
        if dz == 0.0 {
            return;
        }
        if let (Ok(fa), Ok(fb)) = (f.eval(t, a), f.eval(t, b)) {
            best = best.max((fa - fb).abs() / dz);
        }
    };
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    for k in 0..samples.max(2) {
        let t = draw(&mut rng, region.time);
        for i in 0..dim {
            a[i] = draw(&mut rng, region.state[i]);
            b[i] = draw(&mut rng, region.state[i]);
        }
        ratio(t, &a, &b);
        let c = k % dim;
        let keep = b[c];
        b.copy_from_slice(&a);
        b[c] = keep;
        ratio(t, &a, &b);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Box<Expr> {
        Box::new(Expr::Num(v))
    }

    #[test]
    fn parses_precedence() {
        let e = parse("t + x*d1", 1).unwrap();
        assert_eq!(
            e,
            Expr::Binary(
                BinOp::Add,
                Box::new(Expr::Var(Var::Time)),
                Box::new(Expr::Binary(
                    BinOp::Mul,
                    Box::new(Expr::Var(Var::State(0))),
                    Box::new(Expr::Var(Var::State(1)))
                ))
            )
        );
        assert_eq!(parse("2^3^2", 0).unwrap().eval(0.0, &[0.0]).unwrap(), 512.0);
        assert_eq!(parse("-2^2", 0).unwrap().eval(0.0, &[0.0]).unwrap(), -4.0);
        assert_eq!(parse("2^-1", 0).unwrap().eval(0.0, &[0.0]).unwrap(), 0.5);
        assert_eq!(parse("8/4/2", 0).unwrap().eval(0.0, &[0.0]).unwrap(), 1.0);
        assert_eq!(parse("1-2-3", 0).unwrap().eval(0.0, &[0.0]).unwrap(), -4.0);
        assert_eq!(
            parse("-x*2", 0).unwrap(),
            Expr::Binary(BinOp::Mul, Box::new(Expr::Neg(Box::new(Expr::Var(Var::State(0))))), num(2.0))
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse("d2", 1),
            Err(ExprError::ArityExceeded { index: 2, arity: 1, offset: 0 })
        ));
        assert!(matches!(
            parse("x + y", 0),
            Err(ExprError::UnknownIdentifier { offset: 4, .. })
        ));
        assert!(matches!(parse("1 +", 0), Err(ExprError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("(1", 0), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("1 $ 2", 0), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("sin 1", 0), Err(ExprError::Syntax { offset: 4, .. })));
        assert!(matches!(parse("1e", 0), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("d0", 3), Err(ExprError::UnknownIdentifier { .. })));
        assert!(matches!(parse("2 3", 0), Err(ExprError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn eval_examples() {
        let f = RhsFunction::parse("1", 2).unwrap();
        assert_eq!(f.eval(3.0, &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        let f = RhsFunction::parse("x + t", 0).unwrap();
        assert_eq!(f.eval(2.0, &[3.0]).unwrap(), 5.0);
        let f = RhsFunction::parse("sin(d1)", 1).unwrap();
        let v = f.eval(0.0, &[0.0, std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(f.eval(0.0, &[0.0]).is_err());
        let g = RhsFunction::parse("gamma(x) + exp(0) + abs(-2) + sqrt(4) + cos(0) + ln(1)", 0).unwrap();
        assert!((g.eval(0.0, &[5.0]).unwrap() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn eval_domain_faults() {
        let ev = |s: &str, x: f64| RhsFunction::parse(s, 0).unwrap().eval(0.0, &[x]);
        assert!(ev("ln(x)", 0.0).is_err());
        assert!(ev("1/x", 0.0).is_err());
        assert!(ev("sqrt(x)", -1.0).is_err());
        assert!(ev("gamma(x)", -2.0).is_err());
        assert!(ev("x^0.5", -1.0).is_err());
        assert!(ev("exp(x)", 1e4).is_err());
    }

    #[test]
    fn display_round_trip() {
        for src in ["t + x*d1", "-(2^3^2)", "gamma(1.5)*t^2 - sin(x)/3", "1e-7 + 2.5e300", "-x^2"] {
            let e = parse(src, 1).unwrap();
            assert_eq!(parse(&e.to_string(), 1).unwrap(), e, "{src} -> {e}");
        }
    }

    #[test]
    fn lipschitz_examples() {
        let region = |m| ProbeBox::uniform((0.0, 1.0), m, (-2.0, 2.0));
        let l = lipschitz_probe(&RhsFunction::parse("x", 0).unwrap(), &region(0), 200);
        assert!((l - 1.0).abs() < 1e-12);
        let l = lipschitz_probe(&RhsFunction::parse("2*x + 3*d1", 1).unwrap(), &region(1), 2000);
        assert!((l - 3.0).abs() < 1e-9, "{l}");
        let l = lipschitz_probe(&RhsFunction::parse("t", 0).unwrap(), &region(0), 200);
        assert_eq!(l, 0.0);
    }

    #[test]
    fn lipschitz_linear_combination_converges() {
        let f = RhsFunction::parse("0.5*x - 1.25*d1 + 0.75*d2", 2).unwrap();
        let l = lipschitz_probe(&f, &ProbeBox::uniform((0.0, 1.0), 2, (-1.0, 1.0)), 100_000);
        assert!((l - 1.25).abs() <= 0.05 * 1.25, "{l}");
    }

    #[test]
    fn new_checks_arity() {
        let e = parse("d3", 3).unwrap();
        assert!(RhsFunction::new(e.clone(), 2).is_err());
        assert!(RhsFunction::new(e, 3).is_ok());
    }
}
