//! First- and second-kind Beltrami operators.
//!
//! With `g^ij` the inverse metric and `Γ^k_ij` the Christoffel symbols:
//!
//! * `Δ1(Φ, Ψ) = 2 Σ g^ij ∂_iΦ ∂_jΨ`
//! * `Δ1(Φ) = ½ Δ1(Φ, Φ) = Σ g^ij ∂_iΦ ∂_jΦ`
//! * `Δ2(Φ) = Σ g^ij (∂_i∂_jΦ − Σ_k Γ^k_ij ∂_kΦ)`
//!
//! All results are complex; fields may be complex-valued.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::charts::{Chart, ChartError, MetricAt, PointGeometry};
use crate::expr::{EvalError, Expr, ScalarField};
use crate::jets::{ComplexScalar, Jet2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeltramiError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("field has {field} coordinates but chart `{chart}` has {chart_dim}")]
    DimensionMismatch {
        field: usize,
        chart: String,
        chart_dim: usize,
    },
    #[error("norm ratio is undefined at the origin")]
    ZeroPoint,
    #[error("unknown analytic function `{0}`")]
    UnknownFunction(String),
}

/// `2 Σ g^ij ∂_iΦ ∂_jΨ`.
pub fn delta1_pair_jets(phi: &Jet2, psi: &Jet2, metric: &MetricAt) -> ComplexScalar {
    2.0 * bilinear(phi, psi, metric)
}

/// `Σ g^ij ∂_iΦ ∂_jΦ`.
pub fn delta1_jet(phi: &Jet2, metric: &MetricAt) -> ComplexScalar {
    bilinear(phi, phi, metric)
}

fn bilinear(a: &Jet2, b: &Jet2, metric: &MetricAt) -> ComplexScalar {
    let (da, db) = (a.gradient(), b.gradient());
    let n = da.len();
    let mut sum = ComplexScalar::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            sum += metric.g_inv[(i, j)] * da[i] * db[j];
        }
    }
    sum
}

/// `Σ g^ij (∂_i∂_jΦ − Γ^k_ij ∂_kΦ)`.
pub fn delta2_jet(phi: &Jet2, geometry: &PointGeometry) -> ComplexScalar {
    let grad = phi.gradient();
    let n = grad.len();
    let gamma = &geometry.christoffel.gamma;
    let mut sum = ComplexScalar::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let mut connection = ComplexScalar::new(0.0, 0.0);
            for (k, dk) in grad.iter().enumerate() {
                connection += gamma.get(k, i, j) * dk;
            }
            sum += geometry.metric.g_inv[(i, j)] * (phi.hessian(i, j) - connection);
        }
    }
    sum
}

fn field_jet(field: &ScalarField, chart: &Chart, point: &[f64]) -> Result<Jet2, BeltramiError> {
    if field.dim() != chart.dim() {
        return Err(BeltramiError::DimensionMismatch {
            field: field.dim(),
            chart: chart.name().to_string(),
            chart_dim: chart.dim(),
        });
    }
    Ok(field.eval_jet2(point)?)
}

pub fn delta1_pair(
    phi: &ScalarField,
    psi: &ScalarField,
    chart: &Chart,
    point: &[f64],
) -> Result<ComplexScalar, BeltramiError> {
    let a = field_jet(phi, chart, point)?;
    let b = field_jet(psi, chart, point)?;
    let metric = crate::charts::metric_at(chart, point)?;
    Ok(delta1_pair_jets(&a, &b, &metric))
}

pub fn delta1(phi: &ScalarField, chart: &Chart, point: &[f64]) -> Result<ComplexScalar, BeltramiError> {
    let a = field_jet(phi, chart, point)?;
    let metric = crate::charts::metric_at(chart, point)?;
    Ok(delta1_jet(&a, &metric))
}

pub fn delta2(phi: &ScalarField, chart: &Chart, point: &[f64]) -> Result<ComplexScalar, BeltramiError> {
    let a = field_jet(phi, chart, point)?;
    let geometry = PointGeometry::at(chart, point)?;
    Ok(delta2_jet(&a, &geometry))
}

/// `‖u‖² / |u|²` with `‖u‖² = Σ g^ij u_i u_j` and `|u|² = Σ u_k²`, where `u`
/// is the coordinate tuple itself.
pub fn norm_ratio(chart: &Chart, point: &[f64]) -> Result<f64, BeltramiError> {
    let metric = crate::charts::metric_at(chart, point)?;
    norm_ratio_with(&metric, point)
}

pub fn norm_ratio_with(metric: &MetricAt, point: &[f64]) -> Result<f64, BeltramiError> {
    let euclid: f64 = point.iter().map(|u| u * u).sum();
    if euclid == 0.0 {
        return Err(BeltramiError::ZeroPoint);
    }
    let n = point.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += metric.g_inv[(i, j)] * point[i] * point[j];
        }
    }
    Ok(quad / euclid)
}

/// Single-variable analytic functions used in composition rules.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticFn {
    Identity,
    Square,
    Cube,
    Exp,
    Sin,
    Log1p,
    /// `Σ_{n=1..K} c_n zⁿ`; `coefficients[0]` is `c_1`.
    Polynomial(Vec<f64>),
}

impl AnalyticFn {
    pub fn name(&self) -> String {
        match self {
            Self::Identity => "identity".into(),
            Self::Square => "square".into(),
            Self::Cube => "cube".into(),
            Self::Exp => "exp".into(),
            Self::Sin => "sin".into(),
            Self::Log1p => "log1p".into(),
            Self::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(f64::to_string).collect();
                format!("polynomial({})", parts.join(","))
            }
        }
    }

    /// `(f(z), f'(z), f''(z))`.
    pub fn derivatives(&self, z: ComplexScalar) -> (ComplexScalar, ComplexScalar, ComplexScalar) {
        let one = ComplexScalar::new(1.0, 0.0);
        let zero = ComplexScalar::new(0.0, 0.0);
        match self {
            Self::Identity => (z, one, zero),
            Self::Square => (z * z, 2.0 * z, 2.0 * one),
            Self::Cube => (z * z * z, 3.0 * z * z, 6.0 * z),
            Self::Exp => {
                let e = z.exp();
                (e, e, e)
            }
            Self::Sin => (z.sin(), z.cos(), -z.sin()),
            Self::Log1p => {
                let w = one + z;
                (w.ln(), one / w, -one / (w * w))
            }
            Self::Polynomial(c) => {
                let (mut f, mut f1, mut f2) = (zero, zero, zero);
                // Horner on f, f', f'' simultaneously, highest degree first.
                for &ck in c.iter().rev() {
                    f2 = f2 * z + 2.0 * f1;
                    f1 = f1 * z + f;
                    f = f * z + ck;
                }
                // f now holds Σ c_n z^{n-1}; shift by one power of z.
                let (g, g1, g2) = (f, f1, f2);
                (z * g, g + z * g1, 2.0 * g1 + z * g2)
            }
        }
    }

    /// The tree `f(arg)`.
    pub fn apply(&self, arg: Expr) -> Expr {
        match self {
            Self::Identity => arg,
            Self::Square => arg.powi(2),
            Self::Cube => arg.powi(3),
            Self::Exp => arg.exp(),
            Self::Sin => arg.sin(),
            Self::Log1p => (Expr::real(1.0) + arg).log(),
            Self::Polynomial(c) => {
                let mut terms = c
                    .iter()
                    .enumerate()
                    .filter(|(_, &ck)| ck != 0.0)
                    .map(|(k, &ck)| Expr::real(ck) * arg.clone().powi(k as i32 + 1));
                match terms.next() {
                    None => Expr::real(0.0),
                    Some(first) => terms.fold(first, |acc, t| acc + t),
                }
            }
        }
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for AnalyticFn {
    type Err = BeltramiError;

    /// Accepts the tag names and `polynomial(c1,c2,...)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s {
            "identity" => Self::Identity,
            "square" => Self::Square,
            "cube" => Self::Cube,
            "exp" => Self::Exp,
            "sin" => Self::Sin,
            "log1p" => Self::Log1p,
            _ => {
                let inner = s
                    .strip_prefix("polynomial(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| BeltramiError::UnknownFunction(s.to_string()))?;
                let coeffs = inner
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| BeltramiError::UnknownFunction(s.to_string()))?;
                Self::Polynomial(coeffs)
            }
        })
    }
}

/// The field `f(Φ(u))`.
pub fn compose(f: &AnalyticFn, phi: &ScalarField) -> ScalarField {
    ScalarField {
        expr: f.apply(phi.expr.clone()),
        coords: phi.coords.clone(),
    }
}
