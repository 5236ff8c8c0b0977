//! Double-double evaluation of first derivatives and the first Beltrami
//! operator.
//!
//! Null identities compare a sum of large terms against zero. In `f64` the
//! terms cancel only to about `ε · Σ|term|`, which is far above any useful
//! tolerance once the terms reach `1e8`. The same expressions evaluated in
//! double-double arithmetic (about 32 significant digits) recover the
//! cancellation to the last `f64` bit.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::beltrami::BeltramiError;
use crate::charts::{Chart, ChartError};
use crate::expr::{BinaryOp, EvalError, Expr, ExprKind, ScalarField};
use crate::jets::{ComplexScalar, ElementaryFn, JetError};

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

const FRAC_PI_2: Dd = Dd {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplies by `2^k` exactly.
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::new(self.hi.sqrt());
        }
        let s = self.hi.sqrt();
        let y = Self::new(s);
        y + (self - y.sqr()) * Self::new(0.5 / s)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Self::new(k)).ldexp(-9);
        // expm1 of the reduced argument, then nine doublings of expm1
        let mut term = r;
        let mut sum = r;
        for n in 2..=14 {
            term = term * r / Self::new(f64::from(n));
            sum = sum + term;
        }
        for _ in 0..9 {
            sum = sum.ldexp(1) + sum.sqr();
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::new(f64::NAN);
        }
        let y = Self::new(self.hi.ln());
        y + self * (-y).exp() - Self::ONE
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let k = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2 * Self::new(k);
        let r2 = r.sqr();
        // Taylor series on |r| ≤ π/4
        let (mut s, mut c) = (r, Self::ONE);
        let (mut ts, mut tc) = (r, Self::ONE);
        for n in 1..=16 {
            let n = f64::from(n);
            ts = -(ts * r2) / Self::new((2.0 * n) * (2.0 * n + 1.0));
            tc = -(tc * r2) / Self::new((2.0 * n - 1.0) * (2.0 * n));
            s = s + ts;
            c = c + tc;
        }
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    /// Angle of the vector `(x, self)`.
    pub fn atan2(self, x: Self) -> Self {
        let z = Self::new(self.hi.atan2(x.hi));
        let (s, c) = z.sin_cos();
        z + (self * c - x * s) / (x * c + self * s)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Self::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::renorm(s1, s2 + t2)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        Dd::renorm(p1, p2 + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::new(q2);
        let q3 = r.hi / b.hi;
        Dd::renorm(q1, q2) + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };
    pub const I: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ONE,
    };

    pub fn real(x: Dd) -> Self {
        Self { re: x, im: Dd::ZERO }
    }

    pub fn from_c64(z: ComplexScalar) -> Self {
        Self {
            re: Dd::new(z.re),
            im: Dd::new(z.im),
        }
    }

    pub fn to_c64(self) -> ComplexScalar {
        ComplexScalar::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn scale(self, s: Dd) -> Self {
        Self {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn exp(self) -> Self {
        let (s, c) = self.im.sin_cos();
        let m = self.re.exp();
        Self { re: m * c, im: m * s }
    }

    pub fn ln(self) -> Self {
        let modulus2 = self.re.sqr() + self.im.sqr();
        Self {
            re: modulus2.ln().ldexp(-1),
            im: self.im.atan2(self.re),
        }
    }

    fn sinh_cosh(x: Dd) -> (Dd, Dd) {
        let e = x.exp();
        let inv = Dd::ONE / e;
        ((e - inv).ldexp(-1), (e + inv).ldexp(-1))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = Self::sinh_cosh(self.im);
        Self { re: s * ch, im: c * sh }
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = Self::sinh_cosh(self.im);
        Self { re: c * ch, im: -(s * sh) }
    }

    pub fn sqrt(self) -> Self {
        if self.im == Dd::ZERO && self.re.hi > 0.0 {
            return Self::real(self.re.sqrt());
        }
        self.ln().scale(Dd::new(0.5)).exp()
    }

    pub fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::ONE / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, b: Cdd) -> Cdd {
        let d = b.re.sqr() + b.im.sqr();
        Cdd {
            re: (self.re * b.re + self.im * b.im) / d,
            im: (self.im * b.re - self.re * b.im) / d,
        }
    }
}

/// Value and gradient of a field at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    pub value: Cdd,
    pub gradient: Vec<Cdd>,
}

impl Jet1 {
    fn constant(value: Cdd, n: usize) -> Self {
        Self {
            value,
            gradient: vec![Cdd::ZERO; n],
        }
    }

    fn chain(&self, f0: Cdd, f1: Cdd) -> Self {
        Self {
            value: f0,
            gradient: self.gradient.iter().map(|&g| f1 * g).collect(),
        }
    }

    fn zip(&self, other: &Self, value: Cdd, f: impl Fn(Cdd, Cdd) -> Cdd) -> Self {
        Self {
            value,
            gradient: self
                .gradient
                .iter()
                .zip(&other.gradient)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Applies `function` with its domain checked at the rounded argument.
fn apply(function: ElementaryFn, x: &Jet1, exponent: Option<Cdd>) -> Result<Jet1, JetError> {
    let z = x.value;
    function.value(z.to_c64())?;
    let (f0, f1) = match function {
        ElementaryFn::Neg => (-z, -Cdd::ONE),
        ElementaryFn::Exp => {
            let e = z.exp();
            (e, e)
        }
        ElementaryFn::Log => (z.ln(), Cdd::ONE / z),
        ElementaryFn::Sin => (z.sin(), z.cos()),
        ElementaryFn::Cos => (z.cos(), -z.sin()),
        ElementaryFn::Tan => {
            let t = z.sin() / z.cos();
            (t, Cdd::ONE + t * t)
        }
        ElementaryFn::Sqrt => {
            let s = z.sqrt();
            (s, Cdd::ONE / (s + s))
        }
        ElementaryFn::Arctan => {
            let iz = Cdd::I * z;
            let half_i = Cdd {
                re: Dd::ZERO,
                im: Dd::new(0.5),
            };
            (
                half_i * ((Cdd::ONE - iz).ln() - (Cdd::ONE + iz).ln()),
                Cdd::ONE / (Cdd::ONE + z * z),
            )
        }
        ElementaryFn::Artanh => (
            ((Cdd::ONE + z).ln() - (Cdd::ONE - z).ln()).scale(Dd::new(0.5)),
            Cdd::ONE / (Cdd::ONE - z * z),
        ),
        ElementaryFn::Powi(n) => match n {
            0 => (Cdd::ONE, Cdd::ZERO),
            _ => (
                z.powi(n),
                Cdd::real(Dd::new(f64::from(n))) * z.powi(n - 1),
            ),
        },
        ElementaryFn::Powc(a) => {
            let a = exponent.unwrap_or_else(|| Cdd::from_c64(a));
            let v = (a * z.ln()).exp();
            (v, a * v / z)
        }
    };
    if f0.is_finite() && f1.is_finite() {
        Ok(x.chain(f0, f1))
    } else {
        Err(JetError::Domain {
            function: function.name(),
            arg: z.to_c64(),
        })
    }
}

fn domain(e: &Expr) -> impl Fn(JetError) -> EvalError + '_ {
    move |source| EvalError::Domain { source, span: e.span }
}

fn jet1_of(e: &Expr, point: &[f64]) -> Result<Jet1, EvalError> {
    let n = point.len();
    let err = domain(e);
    Ok(match &e.kind {
        ExprKind::Real(x) => Jet1::constant(Cdd::real(Dd::new(*x)), n),
        ExprKind::I => Jet1::constant(Cdd::I, n),
        ExprKind::Coord(k) => {
            let mut j = Jet1::constant(Cdd::real(Dd::new(point[*k])), n);
            j.gradient[*k] = Cdd::ONE;
            j
        }
        ExprKind::Norm => {
            let sum = point.iter().fold(Dd::ZERO, |acc, &u| acc + Dd::new(u).sqr());
            let norm = sum.sqrt();
            if norm.hi == 0.0 {
                return Err(err(JetError::Domain {
                    function: "sqrt",
                    arg: ComplexScalar::new(0.0, 0.0),
                }));
            }
            Jet1 {
                value: Cdd::real(norm),
                gradient: point.iter().map(|&u| Cdd::real(Dd::new(u) / norm)).collect(),
            }
        }
        ExprKind::Neg(a) => apply(ElementaryFn::Neg, &jet1_of(a, point)?, None).map_err(&err)?,
        ExprKind::Call(func, a) => apply(func.elementary(), &jet1_of(a, point)?, None).map_err(&err)?,
        ExprKind::Binary(BinaryOp::Pow, base, exponent) => {
            let b = jet1_of(base, point)?;
            if exponent.is_constant() {
                let c = jet1_of(exponent, point)?.value;
                apply(ElementaryFn::power(c.to_c64()), &b, Some(c)).map_err(&err)?
            } else {
                let x = jet1_of(exponent, point)?;
                let log_b = apply(ElementaryFn::Log, &b, None).map_err(&err)?;
                let prod = x.zip(&log_b, x.value * log_b.value, |da, db| da * log_b.value + x.value * db);
                apply(ElementaryFn::Exp, &prod, None).map_err(&err)?
            }
        }
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (jet1_of(a, point)?, jet1_of(b, point)?);
            let (u, v) = (a.value, b.value);
            match op {
                BinaryOp::Add => a.zip(&b, u + v, |x, y| x + y),
                BinaryOp::Sub => a.zip(&b, u - v, |x, y| x - y),
                BinaryOp::Mul => a.zip(&b, u * v, |x, y| x * v + u * y),
                BinaryOp::Div => {
                    if v == Cdd::ZERO {
                        return Err(err(JetError::DivisionByZero));
                    }
                    let v2 = v * v;
                    a.zip(&b, u / v, |x, y| (x * v - u * y) / v2)
                }
                BinaryOp::Pow => unreachable!(),
            }
        }
    })
}

/// Value and gradient of `field` at `point` in double-double precision.
pub fn jet1(field: &ScalarField, point: &[f64]) -> Result<Jet1, EvalError> {
    if point.len() != field.dim() {
        return Err(EvalError::Arity {
            expected: field.dim(),
            got: point.len(),
        });
    }
    let j = jet1_of(&field.expr, point)?;
    if j.value.is_finite() && j.gradient.iter().all(|g| g.is_finite()) {
        Ok(j)
    } else {
        Err(EvalError::Domain {
            source: JetError::Domain {
                function: "evaluation",
                arg: j.value.to_c64(),
            },
            span: field.expr.span,
        })
    }
}

/// Inverse of the pullback metric, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseMetric {
    n: usize,
    data: Vec<Dd>,
}

impl InverseMetric {
    /// Builds `(JᵀJ)⁻¹` from double-double Jacobians of the embedding.
    /// Returns `None` when the metric is numerically singular.
    pub fn at(chart: &Chart, point: &[f64]) -> Result<Option<Self>, EvalError> {
        let n = chart.dim();
        let rows = chart
            .embedding()
            .iter()
            .map(|x| jet1(x, point).map(|j| j.gradient.iter().map(|g| g.re).collect::<Vec<Dd>>()))
            .collect::<Result<Vec<_>, _>>()?;
        // [g | I] reduced by Gauss-Jordan with partial pivoting
        let w = 2 * n;
        let mut m = vec![Dd::ZERO; n * w];
        for i in 0..n {
            for k in 0..n {
                m[i * w + k] = rows.iter().fold(Dd::ZERO, |acc, r| acc + r[i] * r[k]);
            }
            m[i * w + n + i] = Dd::ONE;
        }
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| m[a * w + col].abs().hi.total_cmp(&m[b * w + col].abs().hi))
                .expect("non-empty range");
            if m[pivot * w + col].hi == 0.0 {
                return Ok(None);
            }
            for k in 0..w {
                m.swap(col * w + k, pivot * w + k);
            }
            let p = m[col * w + col];
            for k in 0..w {
                m[col * w + k] = m[col * w + k] / p;
            }
            for row in (0..n).filter(|&r| r != col) {
                let factor = m[row * w + col];
                if factor == Dd::ZERO {
                    continue;
                }
                for k in 0..w {
                    m[row * w + k] = m[row * w + k] - factor * m[col * w + k];
                }
            }
        }
        let data = (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).map(|(i, k)| m[i * w + n + k]).collect();
        Ok(Some(Self { n, data }))
    }

    pub fn get(&self, i: usize, k: usize) -> Dd {
        self.data[i * self.n + k]
    }

    /// `Σ g^ij a_i b_j`.
    pub fn bilinear(&self, a: &[Cdd], b: &[Cdd]) -> Cdd {
        let mut sum = Cdd::ZERO;
        for i in 0..self.n {
            for j in 0..self.n {
                sum = sum + (a[i] * b[j]).scale(self.get(i, j));
            }
        }
        sum
    }
}

/// `Σ g^ij ∂_iΦ ∂_jΦ` evaluated in double-double arithmetic and rounded.
pub fn delta1(field: &ScalarField, chart: &Chart, point: &[f64]) -> Result<ComplexScalar, BeltramiError> {
    if field.dim() != chart.dim() {
        return Err(BeltramiError::DimensionMismatch {
            field: field.dim(),
            chart: chart.name().to_string(),
            chart_dim: chart.dim(),
        });
    }
    chart.check_point(point)?;
    let inverse = InverseMetric::at(chart, point)?.ok_or_else(|| ChartError::NotPositiveDefinite {
        point: point.to_vec(),
    })?;
    let jet = jet1(field, point)?;
    Ok(inverse.bilinear(&jet.gradient, &jet.gradient).to_c64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{builtin_chart, ChartKind};

    fn close(a: Dd, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn arithmetic_recovers_lost_bits() {
        let third = Dd::ONE / Dd::new(3.0);
        let back = third * Dd::new(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let x = Dd::new(1.0) + Dd::new(1e-20);
        assert_eq!((x - Dd::ONE).to_f64(), 1e-20);
        let two = Dd::new(2.0).sqrt();
        assert!((two.sqr() - Dd::new(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn transcendental_inverse_pairs() {
        for &x in &[-3.7, -0.9, -1e-3, 0.0, 0.2, 1.0, 2.5, 6.1, 12.3] {
            let d = Dd::new(x) / Dd::new(7.0);
            let e = d.exp();
            assert!((e.ln() - d).to_f64().abs() < 1e-30, "exp/ln at {x}");
            assert!(close(e, (x / 7.0).exp(), 1e-15));
            let (s, c) = Dd::new(x).sin_cos();
            assert!((s.sqr() + c.sqr() - Dd::ONE).to_f64().abs() < 1e-30);
            assert!(close(s, x.sin(), 1e-15) && close(c, x.cos(), 1e-15));
            let back = s.atan2(c);
            let reduced = (x + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
            assert!((back.to_f64() - reduced).abs() < 1e-14, "atan2 at {x}");
            if x.abs() < 3.0 {
                assert!((back - Dd::new(x)).to_f64().abs() < 1e-30);
            }
        }
    }

    #[test]
    fn complex_functions_match_f64() {
        let samples = [(0.3, 0.4), (-1.1, 0.7), (2.0, -0.5), (0.1, 0.0)];
        for (re, im) in samples {
            let z = ComplexScalar::new(re, im);
            let w = Cdd::from_c64(z);
            for (got, want) in [
                (w.exp(), z.exp()),
                (w.ln(), z.ln()),
                (w.sin(), z.sin()),
                (w.cos(), z.cos()),
                (w.sqrt(), z.sqrt()),
                (w.powi(-3), z.powi(-3)),
            ] {
                assert!((got.to_c64() - want).norm() < 1e-14 * (1.0 + want.norm()), "{got:?} vs {want}");
            }
        }
    }

    #[test]
    fn gradients_match_double_jets() {
        let coords: Vec<String> = ["u", "v"].iter().map(|s| s.to_string()).collect();
        for text in [
            "exp(i*u)*sin(v)^2",
            "log(u + v) / (1 + u*v)",
            "arctan(u*v) + artanh(u/4) - sqrt(v)",
            "tan(u)*cos(v)",
            "u^v + (u + i)^0.5 + v^-2",
            "norm()^3",
        ] {
            let f = ScalarField::parse(text, &coords).unwrap();
            let p = [0.7, 1.3];
            let a = jet1(&f, &p).unwrap();
            let b = f.eval_jet2(&p).unwrap();
            assert!((a.value.to_c64() - b.value()).norm() < 1e-14 * (1.0 + b.value().norm()), "{text}");
            for k in 0..2 {
                let (x, y) = (a.gradient[k].to_c64(), b.gradient()[k]);
                assert!((x - y).norm() < 1e-13 * (1.0 + y.norm()), "{text} d{k}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn domain_errors_carry_spans() {
        let coords = vec!["u".to_string()];
        let f = ScalarField::parse("2 + log(u)", &coords).unwrap();
        match jet1(&f, &[0.0]) {
            Err(EvalError::Domain { span: Some(s), .. }) => assert_eq!(s.start, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn delta1_agrees_with_double_path() {
        let chart = builtin_chart(ChartKind::Spherical3, 3).unwrap();
        let f = ScalarField::parse("r^2*sin(theta)*exp(i*phi) + r*cos(theta)", chart.coords()).unwrap();
        let p = [1.3, 0.8, 2.1];
        let a = delta1(&f, &chart, &p).unwrap();
        let b = crate::beltrami::delta1(&f, &chart, &p).unwrap();
        assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()));
        assert!(delta1(&f, &chart, &[1.3, 0.8]).is_err());
    }

    #[test]
    fn inverse_metric_of_polar_chart() {
        let chart = builtin_chart(ChartKind::Polar2, 2).unwrap();
        let inv = InverseMetric::at(&chart, &[3.0, 1.0]).unwrap().unwrap();
        assert!((inv.get(0, 0) - Dd::ONE).to_f64().abs() < 1e-30);
        assert!((inv.get(1, 1) - Dd::ONE / Dd::new(9.0)).to_f64().abs() < 1e-30);
        assert!(inv.get(0, 1).to_f64().abs() < 1e-30);
    }
}
