//! Complex second-order forward-mode differentiation.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar field at a
//! single point. Arithmetic on jets applies the first- and second-order
//! product and chain rules, so evaluating an expression tree on seeded
//! coordinate jets yields exact derivatives up to rounding.
//!
//! [`fd_jet`] is a central-difference estimator over plain function values. It
//! shares no code with the jet arithmetic and serves as the oracle for it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout. Real inputs carry a zero imaginary part.
pub type ComplexScalar = Complex64;

const ZERO: ComplexScalar = ComplexScalar::new(0.0, 0.0);
const ONE: ComplexScalar = ComplexScalar::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("jet dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{function} is undefined at {arg}")]
    Domain {
        function: &'static str,
        arg: ComplexScalar,
    },
    #[error("unknown elementary function `{0}`")]
    UnknownFunction(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("finite-difference stencil left the domain at {0:?}")]
    StencilDomain(Vec<f64>),
}

/// Value, gradient and Hessian of a complex field at one point.
///
/// The Hessian is stored dense and row-major. Every constructor fills the
/// upper triangle and mirrors it, so `hessian(i, j) == hessian(j, i)` holds
/// bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    value: ComplexScalar,
    gradient: Vec<ComplexScalar>,
    hessian: Vec<ComplexScalar>,
}

impl Jet2 {
    /// A constant in `dim` variables.
    pub fn constant(value: ComplexScalar, dim: usize) -> Self {
        Self {
            value,
            gradient: vec![ZERO; dim],
            hessian: vec![ZERO; dim * dim],
        }
    }

    /// The jet of the coordinate function `u_k` at `point`.
    pub fn seed(point: &[f64], k: usize) -> Result<Self, JetError> {
        let dim = point.len();
        if k >= dim {
            return Err(JetError::IndexOutOfRange { index: k, dim });
        }
        let mut jet = Self::constant(ComplexScalar::new(point[k], 0.0), dim);
        jet.gradient[k] = ONE;
        Ok(jet)
    }

    /// Builds a jet from explicit parts. Only the upper triangle of
    /// `hessian` is read; the lower triangle is mirrored from it.
    pub fn from_parts(
        value: ComplexScalar,
        gradient: Vec<ComplexScalar>,
        hessian: &[Vec<ComplexScalar>],
    ) -> Result<Self, JetError> {
        let dim = gradient.len();
        if hessian.len() != dim {
            return Err(JetError::DimensionMismatch {
                left: dim,
                right: hessian.len(),
            });
        }
        let mut jet = Self {
            value,
            gradient,
            hessian: vec![ZERO; dim * dim],
        };
        for (i, row) in hessian.iter().enumerate() {
            if row.len() != dim {
                return Err(JetError::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for j in i..dim {
                jet.set_sym(i, j, row[j]);
            }
        }
        Ok(jet)
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn value(&self) -> ComplexScalar {
        self.value
    }

    pub fn gradient(&self) -> &[ComplexScalar] {
        &self.gradient
    }

    pub fn hessian(&self, i: usize, j: usize) -> ComplexScalar {
        self.hessian[i * self.dim() + j]
    }

    pub fn hessian_rows(&self) -> Vec<Vec<ComplexScalar>> {
        self.hessian
            .chunks(self.dim().max(1))
            .take(self.dim())
            .map(<[ComplexScalar]>::to_vec)
            .collect()
    }

    /// True when every component is finite.
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.iter().all(|g| g.is_finite())
            && self.hessian.iter().all(|h| h.is_finite())
    }

    /// Largest component magnitude across value, gradient and Hessian.
    pub fn max_magnitude(&self) -> f64 {
        std::iter::once(&self.value)
            .chain(&self.gradient)
            .chain(&self.hessian)
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn set_sym(&mut self, i: usize, j: usize, v: ComplexScalar) {
        let n = self.dim();
        self.hessian[i * n + j] = v;
        self.hessian[j * n + i] = v;
    }

    fn check_dim(&self, other: &Self) -> Result<(), JetError> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(JetError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, JetError> {
        self.check_dim(other)?;
        Ok(Self {
            value: self.value + other.value,
            gradient: zip_with(&self.gradient, &other.gradient, |a, b| a + b),
            hessian: zip_with(&self.hessian, &other.hessian, |a, b| a + b),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check_dim(other)?;
        Ok(Self {
            value: self.value - other.value,
            gradient: zip_with(&self.gradient, &other.gradient, |a, b| a - b),
            hessian: zip_with(&self.hessian, &other.hessian, |a, b| a - b),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check_dim(other)?;
        let n = self.dim();
        let (a, b) = (self.value, other.value);
        let mut out = Self::constant(a * b, n);
        for i in 0..n {
            out.gradient[i] = a * other.gradient[i] + b * self.gradient[i];
        }
        for i in 0..n {
            for j in i..n {
                let v = a * other.hessian(i, j)
                    + b * self.hessian(i, j)
                    + self.gradient[i] * other.gradient[j]
                    + self.gradient[j] * other.gradient[i];
                out.set_sym(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        self.check_dim(other)?;
        if other.value == ZERO {
            return Err(JetError::DivisionByZero);
        }
        let b = other.value;
        let recip = other.chain(ONE / b, -ONE / (b * b), 2.0 * ONE / (b * b * b));
        self.try_mul(&recip)
    }

    pub fn scale(&self, c: ComplexScalar) -> Self {
        Self {
            value: self.value * c,
            gradient: self.gradient.iter().map(|g| g * c).collect(),
            hessian: self.hessian.iter().map(|h| h * c).collect(),
        }
    }

    /// Composes with a scalar function given its value and first two
    /// derivatives at `self.value()`.
    pub fn chain(&self, f0: ComplexScalar, f1: ComplexScalar, f2: ComplexScalar) -> Self {
        let n = self.dim();
        let mut out = Self::constant(f0, n);
        for i in 0..n {
            out.gradient[i] = f1 * self.gradient[i];
        }
        for i in 0..n {
            for j in i..n {
                let v = f2 * self.gradient[i] * self.gradient[j] + f1 * self.hessian(i, j);
                out.set_sym(i, j, v);
            }
        }
        out
    }
}

fn zip_with(
    a: &[ComplexScalar],
    b: &[ComplexScalar],
    f: impl Fn(ComplexScalar, ComplexScalar) -> ComplexScalar,
) -> Vec<ComplexScalar> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        self.try_add(rhs).expect("jet dimensions must agree")
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        self.try_sub(rhs).expect("jet dimensions must agree")
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.try_mul(rhs).expect("jet dimensions must agree")
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-ONE)
    }
}

/// Elementary functions understood by [`jet_apply`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementaryFn {
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Arctan,
    Artanh,
    /// Integer power; defined for every base except zero with a negative
    /// exponent.
    Powi(i32),
    /// Constant complex power on the principal branch. Arguments on the
    /// closed negative real axis are rejected.
    Powc(ComplexScalar),
}

impl ElementaryFn {
    /// Looks up a named unary function.
    pub fn from_name(name: &str) -> Result<Self, JetError> {
        Ok(match name {
            "neg" => Self::Neg,
            "exp" => Self::Exp,
            "log" => Self::Log,
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "tan" => Self::Tan,
            "sqrt" => Self::Sqrt,
            "arctan" => Self::Arctan,
            "artanh" => Self::Artanh,
            other => return Err(JetError::UnknownFunction(other.to_string())),
        })
    }

    /// Constant power, collapsing integral real exponents to [`Self::Powi`].
    pub fn power(exponent: ComplexScalar) -> Self {
        if exponent.im == 0.0
            && exponent.re.fract() == 0.0
            && exponent.re.abs() <= f64::from(i32::MAX)
        {
            Self::Powi(exponent.re as i32)
        } else {
            Self::Powc(exponent)
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Neg => "neg",
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Sqrt => "sqrt",
            Self::Arctan => "arctan",
            Self::Artanh => "artanh",
            Self::Powi(_) | Self::Powc(_) => "pow",
        }
    }

    fn check_domain(&self, z: ComplexScalar) -> Result<(), JetError> {
        let on_negative_axis = z.im == 0.0 && z.re <= 0.0;
        let bad = match self {
            Self::Log | Self::Sqrt | Self::Powc(_) => on_negative_axis,
            Self::Artanh => z.im == 0.0 && z.re.abs() >= 1.0,
            Self::Arctan => z.re == 0.0 && z.im.abs() >= 1.0,
            Self::Powi(n) => *n < 0 && z == ZERO,
            _ => false,
        };
        if bad {
            Err(JetError::Domain {
                function: self.name(),
                arg: z,
            })
        } else {
            Ok(())
        }
    }

    /// Value of the function alone.
    pub fn value(&self, z: ComplexScalar) -> Result<ComplexScalar, JetError> {
        self.check_domain(z)?;
        let v = match self {
            Self::Neg => -z,
            Self::Exp => z.exp(),
            Self::Log => z.ln(),
            Self::Sin => z.sin(),
            Self::Cos => z.cos(),
            Self::Tan => z.tan(),
            Self::Sqrt => z.sqrt(),
            Self::Arctan => z.atan(),
            Self::Artanh => z.atanh(),
            Self::Powi(n) => z.powi(*n),
            Self::Powc(a) => (a * z.ln()).exp(),
        };
        finite_or_domain(self.name(), z, v)
    }

    /// Value and first two derivatives at `z`.
    pub fn derivatives(
        &self,
        z: ComplexScalar,
    ) -> Result<(ComplexScalar, ComplexScalar, ComplexScalar), JetError> {
        self.check_domain(z)?;
        let d = match self {
            Self::Neg => (-z, -ONE, ZERO),
            Self::Exp => {
                let e = z.exp();
                (e, e, e)
            }
            Self::Log => (z.ln(), ONE / z, -ONE / (z * z)),
            Self::Sin => (z.sin(), z.cos(), -z.sin()),
            Self::Cos => (z.cos(), -z.sin(), -z.cos()),
            Self::Tan => {
                let t = z.tan();
                let sec2 = ONE + t * t;
                (t, sec2, 2.0 * t * sec2)
            }
            Self::Sqrt => {
                let s = z.sqrt();
                (s, 0.5 / s, -0.25 / (s * s * s))
            }
            Self::Arctan => {
                let q = ONE + z * z;
                (z.atan(), ONE / q, -2.0 * z / (q * q))
            }
            Self::Artanh => {
                let q = ONE - z * z;
                (z.atanh(), ONE / q, 2.0 * z / (q * q))
            }
            Self::Powi(n) => {
                let n = *n;
                match n {
                    0 => (ONE, ZERO, ZERO),
                    1 => (z, ONE, ZERO),
                    _ => {
                        let nf = f64::from(n);
                        (
                            z.powi(n),
                            nf * z.powi(n - 1),
                            nf * (nf - 1.0) * z.powi(n - 2),
                        )
                    }
                }
            }
            Self::Powc(a) => {
                let a = *a;
                let ln = z.ln();
                let v = (a * ln).exp();
                (v, a * v / z, a * (a - ONE) * v / (z * z))
            }
        };
        finite_or_domain(self.name(), z, d.0)?;
        finite_or_domain(self.name(), z, d.1)?;
        finite_or_domain(self.name(), z, d.2)?;
        Ok(d)
    }
}

impl fmt::Display for ElementaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Powi(n) => write!(f, "pow({n})"),
            Self::Powc(a) => write!(f, "pow({a})"),
            other => f.write_str(other.name()),
        }
    }
}

fn finite_or_domain(
    function: &'static str,
    arg: ComplexScalar,
    v: ComplexScalar,
) -> Result<ComplexScalar, JetError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(JetError::Domain { function, arg })
    }
}

/// Applies an elementary function to a jet by the second-order chain rule.
pub fn jet_apply(function: ElementaryFn, x: &Jet2) -> Result<Jet2, JetError> {
    let (f0, f1, f2) = function.derivatives(x.value())?;
    Ok(x.chain(f0, f1, f2))
}

/// Step selection for [`fd_jet`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FdStep {
    /// The same absolute step for every coordinate and both orders.
    Fixed(f64),
    /// `eps^(1/3) (1 + |u_k|)` for first derivatives and
    /// `eps^(1/4) (1 + |u_k|)` for second derivatives.
    Auto,
}

impl FdStep {
    fn steps(&self, point: &[f64]) -> Result<(Vec<f64>, Vec<f64>), JetError> {
        match *self {
            Self::Fixed(h) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(JetError::InvalidStep(h));
                }
                Ok((vec![h; point.len()], vec![h; point.len()]))
            }
            Self::Auto => {
                let first = f64::EPSILON.cbrt();
                let second = f64::EPSILON.powf(0.25);
                Ok((
                    point.iter().map(|u| first * (1.0 + u.abs())).collect(),
                    point.iter().map(|u| second * (1.0 + u.abs())).collect(),
                ))
            }
        }
    }
}

/// Central-difference 2-jet of `f` at `point`.
///
/// The gradient uses the two-point central stencil, Hessian diagonals the
/// three-point second difference, and off-diagonals the four-point cross
/// stencil. Any failed evaluation of `f` is reported as a stencil exit.
pub fn fd_jet<F, E>(f: F, point: &[f64], step: FdStep) -> Result<Jet2, JetError>
where
    F: Fn(&[f64]) -> Result<ComplexScalar, E>,
{
    let n = point.len();
    let (h1, h2) = step.steps(point)?;
    let eval = |p: &[f64]| f(p).map_err(|_| JetError::StencilDomain(p.to_vec()));
    let shifted = |moves: &[(usize, f64)]| {
        let mut p = point.to_vec();
        for &(k, d) in moves {
            p[k] += d;
        }
        p
    };

    let f0 = eval(point)?;
    let mut gradient = vec![ZERO; n];
    let mut hessian = vec![vec![ZERO; n]; n];
    for k in 0..n {
        let plus = eval(&shifted(&[(k, h1[k])]))?;
        let minus = eval(&shifted(&[(k, -h1[k])]))?;
        gradient[k] = (plus - minus) / (2.0 * h1[k]);

        let h = h2[k];
        let plus = eval(&shifted(&[(k, h)]))?;
        let minus = eval(&shifted(&[(k, -h)]))?;
        hessian[k][k] = (plus - 2.0 * f0 + minus) / (h * h);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let (a, b) = (h2[k], h2[l]);
            let pp = eval(&shifted(&[(k, a), (l, b)]))?;
            let pm = eval(&shifted(&[(k, a), (l, -b)]))?;
            let mp = eval(&shifted(&[(k, -a), (l, b)]))?;
            let mm = eval(&shifted(&[(k, -a), (l, -b)]))?;
            hessian[k][l] = (pp - pm - mp + mm) / (4.0 * a * b);
        }
    }
    Jet2::from_parts(f0, gradient, &hessian)
}
