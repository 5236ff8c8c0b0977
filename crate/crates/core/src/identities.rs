//! Sampled residual checks for the Beltrami operator identities, and the
//! harmonic constructions on hyperspherical charts.
//!
//! Every identity is written as `LHS = RHS` and evaluated at random domain
//! points with random fields where it quantifies over fields. The reported
//! residual at a point is `|LHS − RHS| / (1 + max(|LHS|, |RHS|))`, and a
//! report passes when the worst sampled residual is below the tolerance.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beltrami::{
    compose, delta1_jet, delta1_pair_jets, delta2_jet, norm_ratio_with, AnalyticFn, BeltramiError,
};
use crate::charts::{builtin_chart, Chart, ChartError, ChartKind, PointGeometry};
use crate::expr::{Expr, ScalarField};
use crate::extended;
use crate::jets::{ComplexScalar, Jet2};

/// Redraws allowed per sample when evaluation fails.
pub const MAX_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentityError {
    #[error("identity {identity} cannot be checked on chart `{chart}`: {reason}")]
    IncompatibleChart {
        identity: IdentityId,
        chart: String,
        reason: &'static str,
    },
    #[error("invalid harmonic spec: {0}")]
    InvalidSpec(String),
    #[error("sample {sample} failed {attempts} times; last error: {last}")]
    EvaluationFailed {
        sample: usize,
        attempts: usize,
        last: String,
    },
    #[error("residual is not finite")]
    NonFinite,
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("unknown psi variant `{0}`")]
    UnknownPsi(String),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Beltrami(#[from] BeltramiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Prop1,
    Prop2,
    Eq10,
    Prop3,
    Eq12,
    Thm1,
    Prop4,
    Prop5,
    Eq17,
    Thm2,
    Eq19And20,
    Lemma1,
    Eq22,
    Eq23,
    Eq24,
    Thm3,
    Prop6i,
    Prop6ii,
}

/// Which charts an identity can be evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartRequirement {
    Any,
    Spherical3,
    EvenHyperspherical,
}

impl IdentityId {
    pub const ALL: [IdentityId; 18] = [
        Self::Prop1,
        Self::Prop2,
        Self::Eq10,
        Self::Prop3,
        Self::Eq12,
        Self::Thm1,
        Self::Prop4,
        Self::Prop5,
        Self::Eq17,
        Self::Thm2,
        Self::Eq19And20,
        Self::Lemma1,
        Self::Eq22,
        Self::Eq23,
        Self::Eq24,
        Self::Thm3,
        Self::Prop6i,
        Self::Prop6ii,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Prop1 => "prop1",
            Self::Prop2 => "prop2",
            Self::Eq10 => "eq10",
            Self::Prop3 => "prop3",
            Self::Eq12 => "eq12",
            Self::Thm1 => "thm1",
            Self::Prop4 => "prop4",
            Self::Prop5 => "prop5",
            Self::Eq17 => "eq17",
            Self::Thm2 => "thm2",
            Self::Eq19And20 => "eq19_20",
            Self::Lemma1 => "lemma1",
            Self::Eq22 => "eq22",
            Self::Eq23 => "eq23",
            Self::Eq24 => "eq24",
            Self::Thm3 => "thm3",
            Self::Prop6i => "prop6i",
            Self::Prop6ii => "prop6ii",
        }
    }

    /// The identity being checked, as a formula.
    pub fn statement(self) -> &'static str {
        match self {
            Self::Prop1 => "Δ1(ΦΨ) = Φ²Δ1Ψ + Ψ²Δ1Φ + ΦΨ Δ1(Φ,Ψ)",
            Self::Prop2 => "Δ1(ΦΨ, Z) = Φ Δ1(Ψ,Z) + Ψ Δ1(Φ,Z)",
            Self::Eq10 => "Δ1(Φ², Z) = 2Φ Δ1(Φ,Z)",
            Self::Prop3 => "Δ1(Φⁿ, Ψ) = nΦⁿ⁻¹ Δ1(Φ,Ψ), n = 2..5",
            Self::Eq12 => "Δ1(Φ+Ψ, Z) = Δ1(Φ,Z) + Δ1(Ψ,Z)",
            Self::Thm1 => "Δ1(f(Φ), Z) = f'(Φ) Δ1(Φ,Z)",
            Self::Prop4 => "Δ2(ΦΨ) = Ψ Δ2Φ + Φ Δ2Ψ + Δ1(Φ,Ψ)",
            Self::Prop5 => "Δ2(Φⁿ) = nΦⁿ⁻¹ Δ2Φ + n(n−1)Φⁿ⁻² Δ1Φ, n = 2..5",
            Self::Eq17 => "Δ2(Φ²) = 2Φ Δ2Φ + Δ1(Φ,Φ)",
            Self::Thm2 => "Δ2(f(Φ)) = f'(Φ) Δ2Φ + f''(Φ) Δ1Φ",
            Self::Eq19And20 => "Δ1W = Δ2W = 0 implies Δ2(f(W)) = 0, W = e^{-iφ} r sinθ",
            Self::Lemma1 => "Δ1(|u|) = ‖u‖²/|u|²",
            Self::Eq22 => "Δ1(Φ(|u|), Ψ(|u|)) = 2 Φ'(|u|) Ψ'(|u|) ‖u‖²/|u|²",
            Self::Eq23 => "Δ2(f(|u|)) = f'(|u|) Δ2(|u|) + f''(|u|) ‖u‖²/|u|²",
            Self::Eq24 => "Δ1(f(e^{-iφ} r sinθ)) = Δ2(f(e^{-iφ} r sinθ)) = 0",
            Self::Thm3 => "Δ1(f(Φ0)) = 0 on hyperspherical coordinates",
            Self::Prop6i => "Δ2(f(Φ0)) = f'(Φ0) Δ2(Φ0)",
            Self::Prop6ii => "Δ1(G) = 0, G = ∏ f_j(x_{2j-1} x_{2j})",
        }
    }

    pub fn requirement(self) -> ChartRequirement {
        match self {
            Self::Eq19And20 | Self::Eq24 => ChartRequirement::Spherical3,
            Self::Thm3 | Self::Prop6i | Self::Prop6ii => ChartRequirement::EvenHyperspherical,
            _ => ChartRequirement::Any,
        }
    }

    /// True for the constructions whose outcome depends on the ψ variant.
    pub fn uses_psi(self) -> bool {
        self.requirement() == ChartRequirement::EvenHyperspherical
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = IdentityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| IdentityError::UnknownIdentity(s.to_string()))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for IdentityId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The angular profile ψ in the harmonic construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiVariant {
    /// `ψ(x) = 2 arctan(tan(x/2))`, which is `x` on `(−π, π)`.
    Paper,
    /// `ψ(x) = log(sec x + tan x)`, so `ψ' = sec x`.
    Corrected,
}

impl PsiVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Paper => "paper",
            Self::Corrected => "corrected",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Paper => "as printed: psi(x) = 2*arctan(tan(x/2))",
            Self::Corrected => "from the ODE y'/y = c*sec(x): psi(x) = log(sec(x) + tan(x))",
        }
    }

    pub fn value(self, x: f64) -> f64 {
        match self {
            Self::Paper => 2.0 * (x / 2.0).tan().atan(),
            Self::Corrected => (1.0 / x.cos() + x.tan()).ln(),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Paper => 1.0,
            Self::Corrected => 1.0 / x.cos(),
        }
    }

    /// The tree `ψ(arg)`.
    pub fn apply(self, arg: Expr) -> Expr {
        match self {
            Self::Paper => {
                Expr::real(2.0) * Expr::call(crate::expr::Func::Arctan, (arg / Expr::real(2.0)).tan())
            }
            Self::Corrected => (Expr::real(1.0) / arg.clone().cos() + arg.tan()).log(),
        }
    }
}

impl fmt::Display for PsiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PsiVariant {
    type Err = IdentityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "corrected" => Ok(Self::Corrected),
            other => Err(IdentityError::UnknownPsi(other.to_string())),
        }
    }
}

/// Parameters of the separable null field on `N`-dimensional hyperspherical
/// coordinates `(r, θ1, …, θ_{N-1})`.
///
/// `exponents[0]` is the power of `r`; `exponents[k]` multiplies the phase
/// `iθ_k` for odd `k` and `ψ(θ_k)` for even `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpec {
    pub dim: usize,
    pub psi: PsiVariant,
    pub exponents: Vec<i32>,
}

impl HarmonicSpec {
    /// Defaults: `r e^{iθ1}`, then `e^{ψ(θ_k)} e^{-iθ_{k+1}}` pairs.
    pub fn new(dim: usize, psi: PsiVariant) -> Result<Self, IdentityError> {
        let exponents = (0..dim)
            .map(|k| if k < 2 || k % 2 == 0 { 1 } else { -1 })
            .collect();
        Self::with_exponents(dim, psi, exponents)
    }

    pub fn with_exponents(dim: usize, psi: PsiVariant, exponents: Vec<i32>) -> Result<Self, IdentityError> {
        if dim < 2 || dim % 2 != 0 {
            return Err(IdentityError::InvalidSpec(format!("dimension {dim} must be even and at least 2")));
        }
        if exponents.len() != dim {
            return Err(IdentityError::InvalidSpec(format!(
                "{} exponents for dimension {dim}",
                exponents.len()
            )));
        }
        Ok(Self { dim, psi, exponents })
    }

    /// The pairing under which the separable sum cancels term by term:
    /// `|p_r| = |p_1|` for the radial pair and `p_k + p_{k+1} = 0` for each
    /// `(ψ(θ_k), iθ_{k+1})` pair.
    pub fn satisfies_pair_constraint(&self) -> bool {
        let p = &self.exponents;
        p[0].abs() == p[1].abs() && (2..self.dim).step_by(2).all(|k| p[k] + p[k + 1] == 0)
    }

    pub fn coords(&self) -> Vec<String> {
        hyperspherical_coords(self.dim)
    }
}

fn hyperspherical_coords(dim: usize) -> Vec<String> {
    let mut coords = vec!["r".to_string()];
    coords.extend((1..dim).map(|j| format!("theta{j}")));
    coords
}

fn scaled(p: i32, e: Expr) -> Expr {
    if p == 1 {
        e
    } else {
        Expr::real(f64::from(p)) * e
    }
}

/// `Φ0 = r^{p_0} ∏ e^{i p_k θ_k} (k odd) ∏ e^{p_k ψ(θ_k)} (k even)`.
pub fn phi0(spec: &HarmonicSpec) -> ScalarField {
    let mut expr = if spec.exponents[0] == 1 {
        Expr::coord(0)
    } else {
        Expr::coord(0).powi(spec.exponents[0])
    };
    for k in 1..spec.dim {
        let p = spec.exponents[k];
        let exponent = if k % 2 == 1 {
            scaled(p, Expr::i() * Expr::coord(k))
        } else {
            scaled(p, spec.psi.apply(Expr::coord(k)))
        };
        expr = expr * exponent.exp();
    }
    ScalarField {
        expr,
        coords: spec.coords(),
    }
}

/// The separable sum
/// `(a1' u1/a1)² + (a2'/a2)² + Σ_{k≥3} (ak'/ak)² ∏_{j=2}^{k-1} sec²(u_j)`
/// for the factors of [`phi0`], evaluated in closed form. `Δ1(Φ0)` equals
/// this sum times `Φ0²/u1²`.
pub fn separable_expansion(spec: &HarmonicSpec, point: &[f64]) -> Result<ComplexScalar, IdentityError> {
    if point.len() != spec.dim {
        return Err(IdentityError::InvalidSpec(format!(
            "point has {} coordinates for dimension {}",
            point.len(),
            spec.dim
        )));
    }
    let p = &spec.exponents;
    let mut sum = ComplexScalar::new(f64::from(p[0] * p[0]), 0.0);
    let mut weight = 1.0;
    for k in 1..spec.dim {
        if k >= 2 {
            let c = point[k - 1].cos();
            if c == 0.0 {
                return Err(IdentityError::InvalidSpec(format!("cos(u{k}) vanishes")));
            }
            weight /= c * c;
        }
        let log_derivative = if k % 2 == 1 {
            ComplexScalar::new(0.0, f64::from(p[k]))
        } else {
            ComplexScalar::new(f64::from(p[k]) * spec.psi.derivative(point[k]), 0.0)
        };
        sum += log_derivative * log_derivative * weight;
    }
    Ok(sum)
}

/// `G = ∏_j f_j(x_{2j-1} x_{2j})` with `x_1 = r`, `x_{2m} = e^{iθ_{2m-1}}` and
/// `x_{2m+1} = e^{ψ(θ_{2m})}`.
pub fn product_construction(fs: &[AnalyticFn], dim: usize, psi: PsiVariant) -> Result<ScalarField, IdentityError> {
    if dim < 2 || dim % 2 != 0 || fs.len() * 2 != dim {
        return Err(IdentityError::InvalidSpec(format!(
            "{} factors for dimension {dim}; need dim = 2n",
            fs.len()
        )));
    }
    let x = |m: usize| -> Expr {
        match m {
            1 => Expr::coord(0),
            m if m % 2 == 0 => (Expr::i() * Expr::coord(m - 1)).exp(),
            m => psi.apply(Expr::coord(m - 1)).exp(),
        }
    };
    let expr = fs
        .iter()
        .enumerate()
        .map(|(j, f)| f.apply(x(2 * j + 1) * x(2 * j + 2)))
        .reduce(|a, b| a * b)
        .expect("at least one factor");
    Ok(ScalarField {
        expr,
        coords: hyperspherical_coords(dim),
    })
}

/// `e^{-iφ} r sinθ` on the spherical chart, which is `x − iy`.
pub fn spherical_null_field() -> ScalarField {
    let coords: Vec<String> = ["r", "theta", "phi"].iter().map(|s| s.to_string()).collect();
    ScalarField {
        expr: (-(Expr::i() * Expr::coord(2))).exp() * Expr::coord(0) * Expr::coord(1).sin(),
        coords,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Poly,
    Trig,
    Mixed,
}

/// Deterministic random field.
///
/// * `Poly`: one to four monomials of total degree at most three with
///   coefficients in `[−2, 2]`; the first monomial is non-constant.
/// * `Trig`: one to three terms `c sin(m u_k)` or `c cos(m u_k)`,
///   `c ∈ [−2, 2]`, `m ∈ {1, 2}`.
/// * `Mixed`: the sum of the two.
pub fn random_field(seed: u64, coords: &[String], kind: FieldKind) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = coords.len();
    let expr = match kind {
        FieldKind::Poly => random_poly(&mut rng, n),
        FieldKind::Trig => random_trig(&mut rng, n),
        FieldKind::Mixed => random_poly(&mut rng, n) + random_trig(&mut rng, n),
    };
    ScalarField {
        expr,
        coords: coords.to_vec(),
    }
}

fn coefficient<R: Rng>(rng: &mut R) -> Expr {
    Expr::real(rng.gen_range(-2.0..=2.0))
}

fn random_poly<R: Rng>(rng: &mut R, n: usize) -> Expr {
    let terms = rng.gen_range(1..=4);
    (0..terms)
        .map(|t| {
            let degree = if t == 0 { rng.gen_range(1..=3) } else { rng.gen_range(0..=3) };
            (0..degree).fold(coefficient(rng), |acc, _| acc * Expr::coord(rng.gen_range(0..n)))
        })
        .reduce(|a, b| a + b)
        .expect("at least one term")
}

fn random_trig<R: Rng>(rng: &mut R, n: usize) -> Expr {
    let terms = rng.gen_range(1..=3);
    (0..terms)
        .map(|_| {
            let k = Expr::coord(rng.gen_range(0..n));
            let arg = if rng.gen_bool(0.5) { k } else { Expr::real(2.0) * k };
            let wave = if rng.gen_bool(0.5) { arg.sin() } else { arg.cos() };
            coefficient(rng) * wave
        })
        .reduce(|a, b| a + b)
        .expect("at least one term")
}

fn draw_field<R: Rng>(rng: &mut R, coords: &[String]) -> ScalarField {
    let kind = [FieldKind::Poly, FieldKind::Trig, FieldKind::Mixed][rng.gen_range(0..3)];
    random_field(rng.gen(), coords, kind)
}

fn draw_analytic_fns<R: Rng>(rng: &mut R) -> Vec<AnalyticFn> {
    let coeffs = (0..3).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    vec![
        AnalyticFn::Identity,
        AnalyticFn::Square,
        AnalyticFn::Cube,
        AnalyticFn::Exp,
        AnalyticFn::Sin,
        AnalyticFn::Log1p,
        AnalyticFn::Polynomial(coeffs),
    ]
}

/// Sampling parameters for [`check_identity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub psi: PsiVariant,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 200,
            tol: 1e-9,
            psi: PsiVariant::Corrected,
        }
    }
}

/// Outcome of a sampled identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: IdentityId,
    pub chart: String,
    pub seed: u64,
    pub samples: usize,
    pub max_abs_residual: f64,
    pub argmax_point: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub psi_variant: Option<PsiVariant>,
    pub dim: usize,
    /// Evaluations that failed and were redrawn.
    #[serde(skip)]
    pub redraws: usize,
}

/// Verdict the identity is expected to reach. The ψ-dependent
/// constructions fail with the printed ψ once `N ≥ 4`, where ψ enters.
pub fn expected_pass(identity: IdentityId, psi: PsiVariant, dim: usize) -> bool {
    !(identity.uses_psi() && psi == PsiVariant::Paper && dim >= 4)
}

/// The builtin charts an identity is run on: the general identities use
/// `euclidean2`, `euclidean3`, `polar2`, `spherical3` and every
/// `hyperspherical{N}` in `dims`; the spherical ones use `spherical3`; the
/// harmonic constructions use `hyperspherical{N}` for even `N` in `dims`.
pub fn suite_charts(identity: IdentityId, dims: &[usize]) -> Result<Vec<Chart>, ChartError> {
    let mut charts = Vec::new();
    match identity.requirement() {
        ChartRequirement::Any => {
            charts.push(builtin_chart(ChartKind::Euclidean, 2)?);
            charts.push(builtin_chart(ChartKind::Euclidean, 3)?);
            charts.push(builtin_chart(ChartKind::Polar2, 2)?);
            charts.push(builtin_chart(ChartKind::Spherical3, 3)?);
            for &n in dims {
                charts.push(builtin_chart(ChartKind::Hyperspherical, n)?);
            }
        }
        ChartRequirement::Spherical3 => charts.push(builtin_chart(ChartKind::Spherical3, 3)?),
        ChartRequirement::EvenHyperspherical => {
            for &n in dims.iter().filter(|&&n| n >= 2 && n % 2 == 0) {
                charts.push(builtin_chart(ChartKind::Hyperspherical, n)?);
            }
        }
    }
    Ok(charts)
}

fn check_compatible(identity: IdentityId, chart: &Chart) -> Result<(), IdentityError> {
    let incompatible = |reason| IdentityError::IncompatibleChart {
        identity,
        chart: chart.name().to_string(),
        reason,
    };
    match identity.requirement() {
        ChartRequirement::Any => Ok(()),
        ChartRequirement::Spherical3 => {
            if *chart == builtin_chart(ChartKind::Spherical3, 3)? {
                Ok(())
            } else {
                Err(incompatible("requires the builtin spherical3 chart"))
            }
        }
        ChartRequirement::EvenHyperspherical => {
            let n = chart.dim();
            if n % 2 == 0 && n >= 2 && *chart == builtin_chart(ChartKind::Hyperspherical, n)? {
                Ok(())
            } else {
                Err(incompatible("requires an even-dimensional builtin hyperspherical chart"))
            }
        }
    }
}

fn relative(lhs: ComplexScalar, rhs: ComplexScalar) -> f64 {
    (lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm()))
}

const ZERO: ComplexScalar = ComplexScalar::new(0.0, 0.0);

/// Geometry and field evaluation at one sampled point.
struct Site<'a> {
    point: &'a [f64],
    geometry: PointGeometry,
}

impl Site<'_> {
    fn jet(&self, field: &ScalarField) -> Result<Jet2, BeltramiError> {
        Ok(field.eval_jet2(self.point)?)
    }

    fn jet_of(&self, expr: Expr, coords: &[String]) -> Result<Jet2, BeltramiError> {
        self.jet(&ScalarField {
            expr,
            coords: coords.to_vec(),
        })
    }

    fn d1_pair(&self, a: &Jet2, b: &Jet2) -> ComplexScalar {
        delta1_pair_jets(a, b, &self.geometry.metric)
    }

    fn d1(&self, a: &Jet2) -> ComplexScalar {
        delta1_jet(a, &self.geometry.metric)
    }

    fn d2(&self, a: &Jet2) -> ComplexScalar {
        delta2_jet(a, &self.geometry)
    }
}

/// Largest relative residual of `identity` at one point, with fields drawn
/// from `rng`.
fn residual_at(
    identity: IdentityId,
    chart: &Chart,
    point: &[f64],
    rng: &mut ChaCha8Rng,
    psi: PsiVariant,
) -> Result<f64, IdentityError> {
    let site = Site {
        point,
        geometry: PointGeometry::at(chart, point)?,
    };
    let coords = chart.coords();
    let mut worst = 0.0f64;
    let mut record = |lhs: ComplexScalar, rhs: ComplexScalar| worst = worst.max(relative(lhs, rhs));

    match identity {
        IdentityId::Prop1 => {
            let (phi, psi_f) = (draw_field(rng, coords), draw_field(rng, coords));
            let (a, b) = (site.jet(&phi)?, site.jet(&psi_f)?);
            let ab = site.jet_of(phi.expr.clone() * psi_f.expr.clone(), coords)?;
            let (va, vb) = (a.value(), b.value());
            record(
                site.d1(&ab),
                va * va * site.d1(&b) + vb * vb * site.d1(&a) + va * vb * site.d1_pair(&a, &b),
            );
        }
        IdentityId::Prop2 => {
            let (phi, psi_f, z) = (draw_field(rng, coords), draw_field(rng, coords), draw_field(rng, coords));
            let (a, b, c) = (site.jet(&phi)?, site.jet(&psi_f)?, site.jet(&z)?);
            let ab = site.jet_of(phi.expr.clone() * psi_f.expr.clone(), coords)?;
            record(
                site.d1_pair(&ab, &c),
                a.value() * site.d1_pair(&b, &c) + b.value() * site.d1_pair(&a, &c),
            );
        }
        IdentityId::Eq10 => {
            let (phi, z) = (draw_field(rng, coords), draw_field(rng, coords));
            let (a, c) = (site.jet(&phi)?, site.jet(&z)?);
            let a2 = site.jet_of(phi.expr.clone().powi(2), coords)?;
            record(site.d1_pair(&a2, &c), 2.0 * a.value() * site.d1_pair(&a, &c));
        }
        IdentityId::Prop3 => {
            let (phi, psi_f) = (draw_field(rng, coords), draw_field(rng, coords));
            let (a, b) = (site.jet(&phi)?, site.jet(&psi_f)?);
            let base = site.d1_pair(&a, &b);
            for n in 2..=5 {
                let an = site.jet_of(phi.expr.clone().powi(n), coords)?;
                let nf = f64::from(n);
                record(site.d1_pair(&an, &b), nf * a.value().powi(n - 1) * base);
            }
        }
        IdentityId::Eq12 => {
            let (phi, psi_f, z) = (draw_field(rng, coords), draw_field(rng, coords), draw_field(rng, coords));
            let (a, b, c) = (site.jet(&phi)?, site.jet(&psi_f)?, site.jet(&z)?);
            let sum = site.jet_of(phi.expr.clone() + psi_f.expr.clone(), coords)?;
            record(site.d1_pair(&sum, &c), site.d1_pair(&a, &c) + site.d1_pair(&b, &c));
        }
        IdentityId::Thm1 | IdentityId::Thm2 => {
            let phi = draw_field(rng, coords);
            let z = draw_field(rng, coords);
            let bounded = random_field(rng.gen(), coords, FieldKind::Trig);
            let c = site.jet(&z)?;
            for f in draw_analytic_fns(rng) {
                // exp of an unbounded polynomial may overflow; the branch cut
                // of log1p is avoided by moving off the real axis.
                let arg = match f {
                    AnalyticFn::Exp => bounded.clone(),
                    AnalyticFn::Log1p => ScalarField {
                        expr: phi.expr.clone() + Expr::i(),
                        coords: coords.to_vec(),
                    },
                    _ => phi.clone(),
                };
                let a = site.jet(&arg)?;
                let fa = site.jet(&compose(&f, &arg))?;
                let (_, d1, d2) = f.derivatives(a.value());
                if identity == IdentityId::Thm1 {
                    record(site.d1_pair(&fa, &c), d1 * site.d1_pair(&a, &c));
                } else {
                    record(site.d2(&fa), d1 * site.d2(&a) + d2 * site.d1(&a));
                }
            }
        }
        IdentityId::Prop4 => {
            let (phi, psi_f) = (draw_field(rng, coords), draw_field(rng, coords));
            let (a, b) = (site.jet(&phi)?, site.jet(&psi_f)?);
            let ab = site.jet_of(phi.expr.clone() * psi_f.expr.clone(), coords)?;
            record(
                site.d2(&ab),
                b.value() * site.d2(&a) + a.value() * site.d2(&b) + site.d1_pair(&a, &b),
            );
        }
        IdentityId::Prop5 => {
            let phi = draw_field(rng, coords);
            let a = site.jet(&phi)?;
            let (v, lap, grad2) = (a.value(), site.d2(&a), site.d1(&a));
            for n in 2..=5 {
                let an = site.jet_of(phi.expr.clone().powi(n), coords)?;
                let nf = f64::from(n);
                record(
                    site.d2(&an),
                    nf * v.powi(n - 1) * lap + nf * (nf - 1.0) * v.powi(n - 2) * grad2,
                );
            }
        }
        IdentityId::Eq17 => {
            let phi = draw_field(rng, coords);
            let a = site.jet(&phi)?;
            let a2 = site.jet_of(phi.expr.clone().powi(2), coords)?;
            record(site.d2(&a2), 2.0 * a.value() * site.d2(&a) + site.d1_pair(&a, &a));
        }
        IdentityId::Eq19And20 => {
            let w = spherical_null_field();
            let a = site.jet(&w)?;
            record(site.d1(&a), ZERO);
            record(site.d2(&a), ZERO);
            for f in draw_analytic_fns(rng) {
                let fa = site.jet(&compose(&f, &w))?;
                record(site.d2(&fa), ZERO);
            }
        }
        IdentityId::Lemma1 => {
            let a = site.jet_of(Expr::norm(), coords)?;
            let ratio = norm_ratio_with(&site.geometry.metric, point)?;
            record(site.d1(&a), ComplexScalar::new(ratio, 0.0));
        }
        IdentityId::Eq22 | IdentityId::Eq23 => {
            let norm = ScalarField {
                expr: Expr::norm(),
                coords: coords.to_vec(),
            };
            let nj = site.jet(&norm)?;
            let ratio = norm_ratio_with(&site.geometry.metric, point)?;
            let fns = draw_analytic_fns(rng);
            for f in &fns {
                let fa = site.jet(&compose(f, &norm))?;
                let (_, f1, f2) = f.derivatives(nj.value());
                if identity == IdentityId::Eq22 {
                    let h = &fns[rng.gen_range(0..fns.len())];
                    let ha = site.jet(&compose(h, &norm))?;
                    let (_, h1, _) = h.derivatives(nj.value());
                    record(site.d1_pair(&fa, &ha), 2.0 * f1 * h1 * ratio);
                } else {
                    record(site.d2(&fa), f1 * site.d2(&nj) + f2 * ratio);
                }
            }
        }
        IdentityId::Eq24 => {
            let w = spherical_null_field();
            for f in [AnalyticFn::Identity, AnalyticFn::Square, AnalyticFn::Exp] {
                let fa = site.jet(&compose(&f, &w))?;
                record(site.d1(&fa), ZERO);
                record(site.d2(&fa), ZERO);
            }
        }
        IdentityId::Thm3 => {
            let spec = HarmonicSpec::new(chart.dim(), psi)?;
            let base = phi0(&spec);
            for f in [AnalyticFn::Identity, AnalyticFn::Square] {
                record(null_delta1(chart, point, &compose(&f, &base))?, ZERO);
            }
        }
        IdentityId::Prop6i => {
            let spec = HarmonicSpec::new(chart.dim(), psi)?;
            let base = phi0(&spec);
            let a = site.jet(&base)?;
            for f in [AnalyticFn::Square, AnalyticFn::Exp] {
                let fa = site.jet(&compose(&f, &base))?;
                let (_, f1, _) = f.derivatives(a.value());
                record(site.d2(&fa), f1 * site.d2(&a));
            }
        }
        IdentityId::Prop6ii => {
            let n = chart.dim() / 2;
            let mixed = [AnalyticFn::Square, AnalyticFn::Exp, AnalyticFn::Cube];
            for fs in [
                vec![AnalyticFn::Identity; n],
                mixed.iter().cycle().take(n).cloned().collect(),
            ] {
                let g = product_construction(&fs, chart.dim(), psi)?;
                record(null_delta1(chart, point, &g)?, ZERO);
            }
        }
    }
    if worst.is_finite() {
        Ok(worst)
    } else {
        Err(IdentityError::NonFinite)
    }
}

/// The null constructions sum terms of order `1e9` that cancel exactly,
/// beyond what `f64` resolves, so their `Δ1` is taken in double-double.
fn null_delta1(chart: &Chart, point: &[f64], field: &ScalarField) -> Result<ComplexScalar, IdentityError> {
    Ok(extended::delta1(field, chart, point)?)
}

fn sample_rng(seed: u64, sample: usize, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((sample as u64) << 8) | attempt as u64);
    rng
}

/// Evaluates `identity` at `config.samples` random points of `chart`.
///
/// Samples are independent and may run in parallel; the report is reduced
/// in sample order, so the result is identical for identical inputs.
pub fn check_identity(identity: IdentityId, chart: &Chart, config: &CheckConfig) -> Result<ResidualReport, IdentityError> {
    check_compatible(identity, chart)?;
    let outcomes: Vec<Result<(f64, Vec<f64>, usize), IdentityError>> = (0..config.samples)
        .into_par_iter()
        .map(|s| {
            let mut last = String::new();
            for attempt in 0..MAX_ATTEMPTS {
                let mut rng = sample_rng(config.seed, s, attempt);
                let point = chart.sample_point(&mut rng);
                match residual_at(identity, chart, &point, &mut rng, config.psi) {
                    Ok(r) => return Ok((r, point, attempt)),
                    Err(e) => last = e.to_string(),
                }
            }
            Err(IdentityError::EvaluationFailed {
                sample: s,
                attempts: MAX_ATTEMPTS,
                last,
            })
        })
        .collect();

    let mut worst = 0.0f64;
    let mut argmax = Vec::new();
    let mut redraws = 0;
    for outcome in outcomes {
        let (r, point, retries) = outcome?;
        redraws += retries;
        if argmax.is_empty() || r > worst {
            worst = r;
            argmax = point;
        }
    }
    Ok(ResidualReport {
        identity,
        chart: chart.name().to_string(),
        seed: config.seed,
        samples: config.samples,
        max_abs_residual: worst,
        argmax_point: argmax,
        tolerance: config.tol,
        pass: worst < config.tol,
        psi_variant: identity.uses_psi().then_some(config.psi),
        dim: chart.dim(),
        redraws,
    })
}
