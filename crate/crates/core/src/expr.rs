//! Expression language for scalar fields and chart embeddings.
//!
//! Grammar, loosest binding first:
//!
//! | level | syntax                         | associativity |
//! |-------|--------------------------------|---------------|
//! | 1     | `a + b`, `a - b`               | left          |
//! | 2     | `a * b`, `a / b`               | left          |
//! | 3     | `-a`                           | prefix        |
//! | 4     | `a ^ b`                        | right         |
//! | 5     | literal, `i`, coordinate, `f(a)`, `norm()`, `(a)` | |
//!
//! so `-u1^2` is `-(u1^2)`, `2*u1^2` is `2*(u1^2)` and `u1-u2-u3` is
//! `(u1-u2)-u3`. Functions: `exp log sin cos tan sqrt arctan artanh`, plus
//! the nullary `norm()` which is the Euclidean norm of the full coordinate
//! tuple. `i` is the imaginary unit. Coordinates are referenced by their
//! declared name or by the positional alias `u1..uN`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rand::Rng;
use thiserror::Error;

use crate::jets::{jet_apply, fd_jet, ComplexScalar, ElementaryFn, FdStep, Jet2, JetError};

/// Byte range of a node in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            Self::Add => " + ",
            Self::Sub => " - ",
            Self::Mul => "*",
            Self::Div => "/",
            Self::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            Self::Add | Self::Sub => 1,
            Self::Mul | Self::Div => 2,
            Self::Pow => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Arctan,
    Artanh,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sqrt,
        Func::Arctan,
        Func::Artanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Sqrt => "sqrt",
            Self::Arctan => "arctan",
            Self::Artanh => "artanh",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub(crate) fn elementary(self) -> ElementaryFn {
        match self {
            Self::Exp => ElementaryFn::Exp,
            Self::Log => ElementaryFn::Log,
            Self::Sin => ElementaryFn::Sin,
            Self::Cos => ElementaryFn::Cos,
            Self::Tan => ElementaryFn::Tan,
            Self::Sqrt => ElementaryFn::Sqrt,
            Self::Arctan => ElementaryFn::Arctan,
            Self::Artanh => ElementaryFn::Artanh,
        }
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    /// Non-negative real literal. Negative constants are `Neg(Real)`.
    Real(f64),
    /// The imaginary unit.
    I,
    /// Coordinate by position.
    Coord(usize),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    /// Euclidean norm of the coordinate tuple.
    Norm,
}

/// Expression tree. Equality is structural and ignores source spans.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Option<Span>,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Real(a), Real(b)) => a.to_bits() == b.to_bits(),
            (I, I) | (Norm, Norm) => true,
            (Coord(a), Coord(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Binary(o1, l1, r1), Binary(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Call(f1, a1), Call(f2, a2)) => f1 == f2 && a1 == a2,
            _ => false,
        }
    }
}

impl Expr {
    fn new(kind: ExprKind) -> Self {
        Self { kind, span: None }
    }

    /// Real constant; negative values become `Neg(Real(|x|))`.
    pub fn real(x: f64) -> Self {
        if x.is_sign_negative() && x != 0.0 {
            -Self::new(ExprKind::Real(-x))
        } else {
            Self::new(ExprKind::Real(x.abs()))
        }
    }

    pub fn i() -> Self {
        Self::new(ExprKind::I)
    }

    pub fn coord(k: usize) -> Self {
        Self::new(ExprKind::Coord(k))
    }

    pub fn norm() -> Self {
        Self::new(ExprKind::Norm)
    }

    pub fn call(func: Func, arg: Expr) -> Self {
        Self::new(ExprKind::Call(func, Box::new(arg)))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Self::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn pow(self, exponent: Expr) -> Self {
        Self::binary(BinaryOp::Pow, self, exponent)
    }

    pub fn powi(self, n: i32) -> Self {
        self.pow(Self::real(f64::from(n)))
    }

    pub fn exp(self) -> Self {
        Self::call(Func::Exp, self)
    }

    pub fn log(self) -> Self {
        Self::call(Func::Log, self)
    }

    pub fn sin(self) -> Self {
        Self::call(Func::Sin, self)
    }

    pub fn cos(self) -> Self {
        Self::call(Func::Cos, self)
    }

    pub fn tan(self) -> Self {
        Self::call(Func::Tan, self)
    }

    /// Highest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match &self.kind {
            ExprKind::Coord(k) => Some(*k),
            ExprKind::Real(_) | ExprKind::I | ExprKind::Norm => None,
            ExprKind::Neg(a) | ExprKind::Call(_, a) => a.max_coord(),
            ExprKind::Binary(_, a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    /// True when the tree references no coordinate and no `norm()`.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            ExprKind::Real(_) | ExprKind::I => true,
            ExprKind::Coord(_) | ExprKind::Norm => false,
            ExprKind::Neg(a) | ExprKind::Call(_, a) => a.is_constant(),
            ExprKind::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match &self.kind {
            ExprKind::Neg(a) | ExprKind::Call(_, a) => 1 + a.size(),
            ExprKind::Binary(_, a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Neg(_) => 3,
            _ => 5,
        }
    }

    /// Renders the tree using `coords` for coordinate names. The output
    /// re-parses to a structurally equal tree.
    pub fn display<'a>(&'a self, coords: &'a [String]) -> impl fmt::Display + 'a {
        Printer { expr: self, coords }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, coords: &[String]) -> fmt::Result {
        let child = |e: &Expr, f: &mut fmt::Formatter<'_>, paren: bool| {
            if paren {
                f.write_str("(")?;
                e.write(f, coords)?;
                f.write_str(")")
            } else {
                e.write(f, coords)
            }
        };
        match &self.kind {
            ExprKind::Real(x) => {
                if x.is_sign_negative() {
                    write!(f, "(-{})", -x)
                } else {
                    write!(f, "{x}")
                }
            }
            ExprKind::I => f.write_str("i"),
            ExprKind::Coord(k) => match coords.get(*k) {
                Some(name) => f.write_str(name),
                None => write!(f, "u{}", k + 1),
            },
            ExprKind::Norm => f.write_str("norm()"),
            ExprKind::Neg(a) => {
                f.write_str("-")?;
                child(a, f, a.precedence() <= 3)
            }
            ExprKind::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, coords)?;
                f.write_str(")")
            }
            ExprKind::Binary(BinaryOp::Pow, a, b) => {
                child(a, f, a.precedence() <= 4)?;
                f.write_str("^")?;
                child(b, f, b.precedence() < 4)
            }
            ExprKind::Binary(op, a, b) => {
                let p = op.precedence();
                child(a, f, a.precedence() < p)?;
                f.write_str(op.symbol())?;
                child(b, f, b.precedence() <= p || matches!(b.kind, ExprKind::Neg(_)))
            }
        }
    }
}

struct Printer<'a> {
    expr: &'a Expr,
    coords: &'a [String],
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, self.coords)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, self, rhs)
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Sub, self, rhs)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, self, rhs)
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, self, rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::new(ExprKind::Neg(Box::new(self)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("point has {got} coordinates, field expects {expected}")]
    Arity { expected: usize, got: usize },
    #[error("{source}{}", .span.map(|s| format!(" (in subexpression at offset {})", s.start)).unwrap_or_default())]
    Domain {
        #[source]
        source: JetError,
        span: Option<Span>,
    },
}

/// Checks a coordinate list for names the grammar cannot reference
/// unambiguously.
pub fn validate_coords(coords: &[String]) -> Result<(), ParseError> {
    for (k, name) in coords.iter().enumerate() {
        let bad = |why: &str| Err(ParseError::new(0, format!("coordinate `{name}` {why}")));
        let mut chars = name.chars();
        let ident = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ident {
            return bad("is not an ASCII identifier");
        }
        if name == "i" || name == "norm" || Func::from_name(name).is_some() {
            return bad("is a reserved word");
        }
        if let Some(idx) = alias_index(name) {
            if idx != k {
                return bad("clashes with a positional alias");
            }
        }
        if coords[..k].contains(name) {
            return bad("is declared twice");
        }
    }
    Ok(())
}

fn alias_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('u')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0')
    {
        return None;
    }
    digits.parse::<usize>().ok().map(|n| n - 1)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Parser<'a> {
    src: &'a str,
    coords: &'a [String],
    pos: usize,
    tok: Tok,
    tok_start: usize,
}

/// Parses `text` against the declared coordinate names.
pub fn parse(text: &str, coords: &[String]) -> Result<Expr, ParseError> {
    validate_coords(coords)?;
    if text.trim().is_empty() {
        return Err(ParseError::new(0, "empty expression"));
    }
    let mut p = Parser {
        src: text,
        coords,
        pos: 0,
        tok: Tok::End,
        tok_start: 0,
    };
    p.advance()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(ParseError::new(p.tok_start, "unexpected trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        if !b.is_ascii() {
            return Err(ParseError::new(self.pos, "non-ASCII character"));
        }
        if b.is_ascii_digit() || b == b'.' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                self.pos += 1;
            }
            if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                let mut q = self.pos + 1;
                if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                    q += 1;
                }
                if q < bytes.len() && bytes[q].is_ascii_digit() {
                    while q < bytes.len() && bytes[q].is_ascii_digit() {
                        q += 1;
                    }
                    self.pos = q;
                }
            }
            let text = &self.src[start..self.pos];
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::new(start, format!("malformed number `{text}`")))?;
            if !value.is_finite() {
                return Err(ParseError::new(start, format!("number `{text}` overflows")));
            }
            self.tok = Tok::Num(value);
        } else if b.is_ascii_alphabetic() || b == b'_' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
        } else if b"+-*/^()".contains(&b) {
            self.pos += 1;
            self.tok = Tok::Sym(b as char);
        } else {
            return Err(ParseError::new(self.pos, format!("unexpected character `{}`", b as char)));
        }
        Ok(())
    }

    fn at(&self, c: char) -> bool {
        self.tok == Tok::Sym(c)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.at(c) {
            self.advance()
        } else {
            Err(ParseError::new(self.tok_start, format!("expected `{c}`")))
        }
    }

    fn spanned(kind: ExprKind, start: usize, end: usize) -> Expr {
        Expr {
            kind,
            span: Some(Span { start, end }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.tok_start;
        let mut lhs = self.term()?;
        loop {
            let op = if self.at('+') {
                BinaryOp::Add
            } else if self.at('-') {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Self::spanned(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), start, self.tok_start);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let start = self.tok_start;
        let mut lhs = self.unary()?;
        loop {
            let op = if self.at('*') {
                BinaryOp::Mul
            } else if self.at('/') {
                BinaryOp::Div
            } else {
                return Ok(lhs);
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Self::spanned(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), start, self.tok_start);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.tok_start;
        if self.at('-') {
            self.advance()?;
            let inner = self.unary()?;
            return Ok(Self::spanned(ExprKind::Neg(Box::new(inner)), start, self.tok_start));
        }
        let base = self.atom()?;
        if self.at('^') {
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(Self::spanned(
                ExprKind::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)),
                start,
                self.tok_start,
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.tok_start;
        match self.tok.clone() {
            Tok::Num(x) => {
                self.advance()?;
                Ok(Self::spanned(ExprKind::Real(x), start, self.tok_start))
            }
            Tok::Sym('(') => {
                self.advance()?;
                let mut inner = self.expr()?;
                self.expect(')')?;
                inner.span = Some(Span { start, end: self.tok_start });
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if name == "i" {
                    return Ok(Self::spanned(ExprKind::I, start, self.tok_start));
                }
                if name == "norm" {
                    self.expect('(')?;
                    self.expect(')')?;
                    return Ok(Self::spanned(ExprKind::Norm, start, self.tok_start));
                }
                if let Some(func) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Self::spanned(ExprKind::Call(func, Box::new(arg)), start, self.tok_start));
                }
                if let Some(k) = self.coords.iter().position(|c| *c == name) {
                    return Ok(Self::spanned(ExprKind::Coord(k), start, self.tok_start));
                }
                match alias_index(&name) {
                    Some(k) if k < self.coords.len() => {
                        Ok(Self::spanned(ExprKind::Coord(k), start, self.tok_start))
                    }
                    _ => Err(ParseError::new(start, format!("unknown identifier `{name}`"))),
                }
            }
            Tok::End => Err(ParseError::new(start, "unexpected end of input")),
            Tok::Sym(c) => Err(ParseError::new(start, format!("unexpected `{c}`"))),
        }
    }
}

/// An expression bound to an ordered coordinate list.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub expr: Expr,
    pub coords: Vec<String>,
}

impl ScalarField {
    pub fn parse(text: &str, coords: &[String]) -> Result<Self, ParseError> {
        Ok(Self {
            expr: parse(text, coords)?,
            coords: coords.to_vec(),
        })
    }

    /// Wraps an expression built in code. Coordinates beyond `coords` are
    /// rejected.
    pub fn from_expr(expr: Expr, coords: &[String]) -> Result<Self, ParseError> {
        validate_coords(coords)?;
        if let Some(k) = expr.max_coord() {
            if k >= coords.len() {
                return Err(ParseError::new(0, format!("coordinate u{} is not declared", k + 1)));
            }
        }
        Ok(Self {
            expr,
            coords: coords.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    fn check_arity(&self, point: &[f64]) -> Result<(), EvalError> {
        if point.len() == self.dim() {
            Ok(())
        } else {
            Err(EvalError::Arity {
                expected: self.dim(),
                got: point.len(),
            })
        }
    }

    /// Exact forward 2-jet at `point`.
    pub fn eval_jet2(&self, point: &[f64]) -> Result<Jet2, EvalError> {
        self.check_arity(point)?;
        let seeds: Vec<Jet2> = (0..point.len())
            .map(|k| Jet2::seed(point, k).expect("index within dimension"))
            .collect();
        jet_of(&self.expr, point, &seeds)
    }

    /// Plain complex value at `point`, without derivatives.
    pub fn eval_value(&self, point: &[f64]) -> Result<ComplexScalar, EvalError> {
        self.check_arity(point)?;
        value_of(&self.expr, point)
    }

    /// Central-difference 2-jet from plain values.
    pub fn fd_jet(&self, point: &[f64], step: FdStep) -> Result<Jet2, JetError> {
        fd_jet(|p: &[f64]| self.eval_value(p), point, step)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr.display(&self.coords))
    }
}

fn domain(span: Option<Span>) -> impl Fn(JetError) -> EvalError {
    move |source| EvalError::Domain { source, span }
}

fn jet_of(e: &Expr, point: &[f64], seeds: &[Jet2]) -> Result<Jet2, EvalError> {
    let n = point.len();
    let err = domain(e.span);
    let jet = match &e.kind {
        ExprKind::Real(x) => Jet2::constant(ComplexScalar::new(*x, 0.0), n),
        ExprKind::I => Jet2::constant(ComplexScalar::i(), n),
        ExprKind::Coord(k) => seeds[*k].clone(),
        ExprKind::Norm => {
            let mut sum = Jet2::constant(ComplexScalar::new(0.0, 0.0), n);
            for s in seeds {
                sum = sum.try_add(&s.try_mul(s).map_err(&err)?).map_err(&err)?;
            }
            jet_apply(ElementaryFn::Sqrt, &sum).map_err(&err)?
        }
        ExprKind::Neg(a) => jet_apply(ElementaryFn::Neg, &jet_of(a, point, seeds)?).map_err(&err)?,
        ExprKind::Call(func, a) => jet_apply(func.elementary(), &jet_of(a, point, seeds)?).map_err(&err)?,
        ExprKind::Binary(BinaryOp::Pow, base, exponent) => {
            let b = jet_of(base, point, seeds)?;
            if exponent.is_constant() {
                let c = value_of(exponent, point)?;
                jet_apply(ElementaryFn::power(c), &b).map_err(&err)?
            } else {
                // b^x = exp(x log b)
                let x = jet_of(exponent, point, seeds)?;
                let log_b = jet_apply(ElementaryFn::Log, &b).map_err(&err)?;
                jet_apply(ElementaryFn::Exp, &x.try_mul(&log_b).map_err(&err)?).map_err(&err)?
            }
        }
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (jet_of(a, point, seeds)?, jet_of(b, point, seeds)?);
            match op {
                BinaryOp::Add => a.try_add(&b),
                BinaryOp::Sub => a.try_sub(&b),
                BinaryOp::Mul => a.try_mul(&b),
                BinaryOp::Div => a.try_div(&b),
                BinaryOp::Pow => unreachable!(),
            }
            .map_err(&err)?
        }
    };
    if jet.is_finite() {
        Ok(jet)
    } else {
        Err(err(JetError::Domain {
            function: "evaluation",
            arg: jet.value(),
        }))
    }
}

fn value_of(e: &Expr, point: &[f64]) -> Result<ComplexScalar, EvalError> {
    let err = domain(e.span);
    let v = match &e.kind {
        ExprKind::Real(x) => ComplexScalar::new(*x, 0.0),
        ExprKind::I => ComplexScalar::i(),
        ExprKind::Coord(k) => ComplexScalar::new(point[*k], 0.0),
        ExprKind::Norm => {
            let sum: f64 = point.iter().map(|u| u * u).sum();
            ElementaryFn::Sqrt
                .value(ComplexScalar::new(sum, 0.0))
                .map_err(&err)?
        }
        ExprKind::Neg(a) => -value_of(a, point)?,
        ExprKind::Call(func, a) => func.elementary().value(value_of(a, point)?).map_err(&err)?,
        ExprKind::Binary(op, a, b) => {
            let (x, y) = (value_of(a, point)?, value_of(b, point)?);
            match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x * y,
                BinaryOp::Div => {
                    if y == ComplexScalar::new(0.0, 0.0) {
                        return Err(err(JetError::DivisionByZero));
                    }
                    x / y
                }
                BinaryOp::Pow if b.is_constant() => ElementaryFn::power(y).value(x).map_err(&err)?,
                BinaryOp::Pow => {
                    let log_x = ElementaryFn::Log.value(x).map_err(&err)?;
                    (y * log_x).exp()
                }
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err(JetError::Domain {
            function: "evaluation",
            arg: v,
        }))
    }
}

/// Random expression tree over `n_coords` coordinates, at most `max_depth`
/// levels deep. Intended for grammar round-trip testing; the result need not
/// be evaluable anywhere.
pub fn random_expr<R: Rng>(rng: &mut R, n_coords: usize, max_depth: usize) -> Expr {
    if max_depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..5) {
            0 => Expr::new(ExprKind::Real(f64::from(rng.gen_range(0u32..100)) / 8.0)),
            1 => Expr::new(ExprKind::Real(rng.gen_range(0.0..1e3))),
            2 => Expr::i(),
            3 => Expr::norm(),
            _ => Expr::coord(rng.gen_range(0..n_coords.max(1))),
        };
    }
    let d = max_depth - 1;
    match rng.gen_range(0..7) {
        0 => -random_expr(rng, n_coords, d),
        1 => Expr::call(Func::ALL[rng.gen_range(0..Func::ALL.len())], random_expr(rng, n_coords, d)),
        k => {
            let op = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow][k - 2];
            Expr::binary(op, random_expr(rng, n_coords, d), random_expr(rng, n_coords, d))
        }
    }
}
