//! Coordinate charts given as embeddings into Euclidean space.
//!
//! The metric of a chart is the pullback `g = JᵀJ` of the ambient Euclidean
//! metric through the embedding Jacobian `J`. First derivatives of `g` come
//! from the embedding's second derivatives, and the Christoffel symbols of
//! the second kind follow from those.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, ParseError, ScalarField};
use crate::jets::Jet2;

/// Largest accepted condition number of `g`.
pub const MAX_CONDITION: f64 = 1e12;
/// Smallest accepted singular value of the embedding Jacobian.
pub const MIN_SINGULAR_VALUE: f64 = 1e-8;
/// Points probed for full rank when loading a chart file.
pub const RANK_PROBES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("unsupported chart {kind} with dimension {dim}")]
    Unsupported { kind: ChartKind, dim: usize },
    #[error("unknown chart kind `{0}`")]
    UnknownKind(String),
    #[error("invalid chart document: {0}")]
    Schema(String),
    #[error("{path}: {error}")]
    Parse { path: String, error: ParseError },
    #[error("chart has {dim} coordinates but {ambient} embedding components; need at least {dim}")]
    Shape { dim: usize, ambient: usize },
    #[error("embedding Jacobian is rank deficient at {point:?} (smallest singular value {sigma_min:e})")]
    RankDeficient { point: Vec<f64>, sigma_min: f64 },
    #[error("point has {got} coordinates, chart has {expected}")]
    Arity { expected: usize, got: usize },
    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("metric at {point:?} is not positive definite")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("metric at {point:?} is singular (condition number {condition:e})")]
    Singular { point: Vec<f64>, condition: f64 },
    #[error("embedding component {component} is not real-valued at {point:?}")]
    ComplexEmbedding { component: usize, point: Vec<f64> },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChartKind {
    Euclidean,
    Polar2,
    Spherical3,
    Hyperspherical,
}

impl ChartKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Polar2 => "polar2",
            Self::Spherical3 => "spherical3",
            Self::Hyperspherical => "hyperspherical",
        }
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChartKind {
    type Err = ChartError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "polar2" => Ok(Self::Polar2),
            "spherical3" => Ok(Self::Spherical3),
            "hyperspherical" => Ok(Self::Hyperspherical),
            other => Err(ChartError::UnknownKind(other.to_string())),
        }
    }
}

/// Open coordinate interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A named coordinate chart: `dim` coordinates embedded into
/// `ambient_dim`-dimensional Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
    embedding: Vec<ScalarField>,
    domain: Vec<Interval>,
}

/// On-disk chart description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDocument {
    pub name: String,
    pub coords: Vec<String>,
    pub embedding: Vec<String>,
    pub domain: Vec<[f64; 2]>,
}

const R_DOMAIN: Interval = Interval { lo: 0.1, hi: 5.0 };
const ANGLE_DOMAIN: Interval = Interval { lo: -1.2, hi: 1.2 };
const AZIMUTH_DOMAIN: Interval = Interval { lo: 0.1, hi: 6.18 };
const POLAR_ANGLE_DOMAIN: Interval = Interval { lo: 0.2, hi: 2.94 };
const EUCLIDEAN_DOMAIN: Interval = Interval { lo: -5.0, hi: 5.0 };

/// Builds one of the builtin charts.
///
/// * `euclidean`: identity embedding of `x1..xN` on `(-5, 5)^N`.
/// * `polar2`: `(r cos θ, r sin θ)`.
/// * `spherical3`: `(r sinθ cosφ, r sinθ sinφ, r cosθ)` with θ the polar angle.
/// * `hyperspherical`: coordinates `(r, θ1, …, θ_{N-1})` with the cosine
///   cascade `x_N = r sin θ1`, `x_{N-j} = r cos θ1 ⋯ cos θj sin θ_{j+1}`,
///   `x_1 = r cos θ1 ⋯ cos θ_{N-1}`.
pub fn builtin_chart(kind: ChartKind, dim: usize) -> Result<Chart, ChartError> {
    let unsupported = || ChartError::Unsupported { kind, dim };
    let (name, coords, embedding, domain): (String, Vec<String>, Vec<String>, Vec<Interval>) = match kind {
        ChartKind::Euclidean => {
            if dim == 0 {
                return Err(unsupported());
            }
            let coords: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
            (format!("euclidean{dim}"), coords.clone(), coords, vec![EUCLIDEAN_DOMAIN; dim])
        }
        ChartKind::Polar2 => {
            if dim != 2 {
                return Err(unsupported());
            }
            (
                "polar2".into(),
                strings(&["r", "theta"]),
                strings(&["r*cos(theta)", "r*sin(theta)"]),
                vec![R_DOMAIN, AZIMUTH_DOMAIN],
            )
        }
        ChartKind::Spherical3 => {
            if dim != 3 {
                return Err(unsupported());
            }
            (
                "spherical3".into(),
                strings(&["r", "theta", "phi"]),
                strings(&["r*sin(theta)*cos(phi)", "r*sin(theta)*sin(phi)", "r*cos(theta)"]),
                vec![R_DOMAIN, POLAR_ANGLE_DOMAIN, AZIMUTH_DOMAIN],
            )
        }
        ChartKind::Hyperspherical => {
            if dim < 2 {
                return Err(unsupported());
            }
            let mut coords = vec!["r".to_string()];
            coords.extend((1..dim).map(|j| format!("theta{j}")));
            let cosines = |upto: usize| -> String {
                (1..=upto).map(|j| format!("*cos(theta{j})")).collect()
            };
            // components listed from x_1 to x_N
            let mut embedding = vec![format!("r{}", cosines(dim - 1))];
            for j in (0..=dim - 2).rev() {
                embedding.push(format!("r{}*sin(theta{})", cosines(j), j + 1));
            }
            let mut domain = vec![R_DOMAIN];
            domain.extend(std::iter::repeat(ANGLE_DOMAIN).take(dim - 2));
            domain.push(AZIMUTH_DOMAIN);
            (format!("hyperspherical{dim}"), coords, embedding, domain)
        }
    };
    Chart::from_parts(name, coords, &embedding, domain)
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Parses and validates a chart document, probing the embedding for full
/// rank at [`RANK_PROBES`] random domain points.
pub fn load_chart(document: &str) -> Result<Chart, ChartError> {
    let doc: ChartDocument =
        serde_json::from_str(document).map_err(|e| ChartError::Schema(e.to_string()))?;
    let dim = doc.coords.len();
    if dim == 0 {
        return Err(ChartError::Schema("`coords` must not be empty".into()));
    }
    if doc.domain.len() != dim {
        return Err(ChartError::Schema(format!(
            "`domain` has {} intervals for {dim} coordinates",
            doc.domain.len()
        )));
    }
    let mut domain = Vec::with_capacity(dim);
    for (k, [lo, hi]) in doc.domain.iter().copied().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ChartError::Schema(format!("domain[{k}] = [{lo}, {hi}] is empty")));
        }
        domain.push(Interval::new(lo, hi));
    }
    let chart = Chart::from_parts(doc.name, doc.coords, &doc.embedding, domain)?;
    chart.check_rank(RANK_PROBES, 0)?;
    Ok(chart)
}

impl Chart {
    /// Assembles a chart from embedding expressions without probing rank.
    pub fn from_parts(
        name: String,
        coords: Vec<String>,
        embedding: &[String],
        domain: Vec<Interval>,
    ) -> Result<Self, ChartError> {
        let dim = coords.len();
        if embedding.len() < dim {
            return Err(ChartError::Shape {
                dim,
                ambient: embedding.len(),
            });
        }
        if domain.len() != dim {
            return Err(ChartError::Schema(format!(
                "{} domain intervals for {dim} coordinates",
                domain.len()
            )));
        }
        let embedding = embedding
            .iter()
            .enumerate()
            .map(|(k, text)| {
                ScalarField::parse(text, &coords).map_err(|error| ChartError::Parse {
                    path: format!("embedding[{k}]"),
                    error,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            name,
            coords,
            embedding,
            domain,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.embedding.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn embedding(&self) -> &[ScalarField] {
        &self.embedding
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && self.domain.iter().zip(point).all(|(iv, &x)| iv.contains(x))
    }

    pub fn check_point(&self, point: &[f64]) -> Result<(), ChartError> {
        if point.len() != self.dim() {
            return Err(ChartError::Arity {
                expected: self.dim(),
                got: point.len(),
            });
        }
        if !self.contains(point) {
            return Err(ChartError::OutsideDomain {
                point: point.to_vec(),
            });
        }
        Ok(())
    }

    /// Uniform sample from the open domain box.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let p: Vec<f64> = self.domain.iter().map(|iv| rng.gen_range(iv.lo..iv.hi)).collect();
            if self.contains(&p) {
                return p;
            }
        }
    }

    /// 2-jets of every embedding component at a domain point.
    pub fn embedding_jets(&self, point: &[f64]) -> Result<Vec<Jet2>, ChartError> {
        self.check_point(point)?;
        self.embedding
            .iter()
            .enumerate()
            .map(|(m, field)| {
                let jet = field.eval_jet2(point)?;
                let scale = jet.max_magnitude().max(1.0);
                let imaginary = std::iter::once(jet.value())
                    .chain(jet.gradient().iter().copied())
                    .any(|c| c.im.abs() > 1e-12 * scale);
                if imaginary {
                    Err(ChartError::ComplexEmbedding {
                        component: m,
                        point: point.to_vec(),
                    })
                } else {
                    Ok(jet)
                }
            })
            .collect()
    }

    /// Embedding Jacobian, `ambient_dim × dim`.
    pub fn jacobian(&self, point: &[f64]) -> Result<DMatrix<f64>, ChartError> {
        let jets = self.embedding_jets(point)?;
        Ok(jacobian_of(&jets))
    }

    /// Probes `probes` random domain points for full-rank Jacobians.
    pub fn check_rank(&self, probes: usize, seed: u64) -> Result<(), ChartError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..probes {
            let p = self.sample_point(&mut rng);
            let sigma_min = self
                .jacobian(&p)?
                .singular_values()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if !(sigma_min > MIN_SINGULAR_VALUE) {
                return Err(ChartError::RankDeficient { point: p, sigma_min });
            }
        }
        Ok(())
    }

    /// Closed-form diagonal of the hyperspherical metric,
    /// `{1, r², r²cos²θ1, …, r²∏cos²θj}`. Only meaningful for the builtin
    /// hyperspherical charts; used to cross-check the pullback.
    pub fn hyperspherical_diagonal(point: &[f64]) -> Vec<f64> {
        let mut out = vec![1.0];
        let mut acc = point[0] * point[0];
        for k in 1..point.len() {
            if k > 1 {
                acc *= point[k - 1].cos().powi(2);
            }
            out.push(acc);
        }
        out
    }
}

fn jacobian_of(jets: &[Jet2]) -> DMatrix<f64> {
    let n = jets.first().map_or(0, Jet2::dim);
    DMatrix::from_fn(jets.len(), n, |m, i| jets[m].gradient()[i].re)
}

/// Metric and inverse metric at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAt {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
}

/// Dense `n × n × n` array indexed `[a][b][c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.n + b) * self.n + c] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Christoffel symbols of the second kind, `gamma.get(i, k, l) = Γ^i_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelAt {
    pub gamma: Tensor3,
}

/// Everything the Beltrami operators need at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGeometry {
    pub metric: MetricAt,
    /// `partials.get(l, i, k) = ∂_l g_ik`.
    pub partials: Tensor3,
    pub christoffel: ChristoffelAt,
}

impl PointGeometry {
    pub fn at(chart: &Chart, point: &[f64]) -> Result<Self, ChartError> {
        let jets = chart.embedding_jets(point)?;
        let metric = metric_from_jets(&jets, point)?;
        let partials = partials_from_jets(&jets);
        let christoffel = christoffel_from(&metric, &partials);
        Ok(Self {
            metric,
            partials,
            christoffel,
        })
    }
}

fn metric_from_jets(jets: &[Jet2], point: &[f64]) -> Result<MetricAt, ChartError> {
    let j = jacobian_of(jets);
    let n = j.ncols();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in i..n {
            let v = j.column(i).dot(&j.column(k));
            g[(i, k)] = v;
            g[(k, i)] = v;
        }
    }
    let eig = g.clone().symmetric_eigen();
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0) {
        return Err(ChartError::NotPositiveDefinite {
            point: point.to_vec(),
        });
    }
    if hi / lo > MAX_CONDITION {
        return Err(ChartError::Singular {
            point: point.to_vec(),
            condition: hi / lo,
        });
    }
    let chol = g.clone().cholesky().ok_or_else(|| ChartError::NotPositiveDefinite {
        point: point.to_vec(),
    })?;
    let mut g_inv = chol.inverse();
    for i in 0..n {
        for k in (i + 1)..n {
            g_inv[(k, i)] = g_inv[(i, k)];
        }
    }
    Ok(MetricAt { g, g_inv })
}

fn partials_from_jets(jets: &[Jet2]) -> Tensor3 {
    let n = jets.first().map_or(0, Jet2::dim);
    let mut out = Tensor3::zeros(n);
    for l in 0..n {
        for i in 0..n {
            for k in i..n {
                let v: f64 = jets
                    .iter()
                    .map(|x| {
                        let grad = x.gradient();
                        x.hessian(l, i).re * grad[k].re + grad[i].re * x.hessian(l, k).re
                    })
                    .sum();
                out.set(l, i, k, v);
                out.set(l, k, i, v);
            }
        }
    }
    out
}

fn christoffel_from(metric: &MetricAt, partials: &Tensor3) -> ChristoffelAt {
    let n = partials.dim();
    let mut gamma = Tensor3::zeros(n);
    for i in 0..n {
        for k in 0..n {
            for l in k..n {
                let v: f64 = (0..n)
                    .map(|m| {
                        metric.g_inv[(i, m)]
                            * (partials.get(k, m, l) + partials.get(l, k, m) - partials.get(m, k, l))
                    })
                    .sum::<f64>()
                    * 0.5;
                gamma.set(i, k, l, v);
                gamma.set(i, l, k, v);
            }
        }
    }
    ChristoffelAt { gamma }
}

/// Induced metric `JᵀJ` and its inverse.
pub fn metric_at(chart: &Chart, point: &[f64]) -> Result<MetricAt, ChartError> {
    metric_from_jets(&chart.embedding_jets(point)?, point)
}

/// `∂_l g_ik`, indexed `[l][i][k]`.
pub fn metric_partials(chart: &Chart, point: &[f64]) -> Result<Tensor3, ChartError> {
    let jets = chart.embedding_jets(point)?;
    metric_from_jets(&jets, point)?;
    Ok(partials_from_jets(&jets))
}

/// `Γ^i_kl = ½ g^in (∂_k g_nl + ∂_l g_kn − ∂_n g_kl)`.
pub fn christoffel_at(chart: &Chart, point: &[f64]) -> Result<ChristoffelAt, ChartError> {
    Ok(PointGeometry::at(chart, point)?.christoffel)
}

/// Largest violation of `∂_i g_lk = g_nl Γ^n_ki + g_kn Γ^n_il` over all
/// index triples.
pub fn compatibility_residual(geometry: &PointGeometry) -> f64 {
    let g = &geometry.metric.g;
    let gamma = &geometry.christoffel.gamma;
    let n = gamma.dim();
    let mut worst = 0.0f64;
    for l in 0..n {
        for i in 0..n {
            for k in 0..n {
                let rhs: f64 = (0..n)
                    .map(|m| g[(m, l)] * gamma.get(m, k, i) + g[(k, m)] * gamma.get(m, i, l))
                    .sum();
                worst = worst.max((geometry.partials.get(i, l, k) - rhs).abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_metric_is_identity() {
        let chart = builtin_chart(ChartKind::Euclidean, 3).unwrap();
        let m = metric_at(&chart, &[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(m.g, DMatrix::identity(3, 3));
        assert_eq!(m.g_inv, DMatrix::identity(3, 3));
        assert_eq!(metric_partials(&chart, &[1.0, 1.0, 1.0]).unwrap().max_abs(), 0.0);
        assert_eq!(christoffel_at(&chart, &[1.0, 1.0, 1.0]).unwrap().gamma.max_abs(), 0.0);
    }

    #[test]
    fn polar_metric_christoffel() {
        let chart = builtin_chart(ChartKind::Polar2, 2).unwrap();
        let p = [2.0, PI / 6.0];
        let m = metric_at(&chart, &p).unwrap();
        assert!((m.g[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((m.g[(1, 1)] - 4.0).abs() < 1e-14);
        assert!(m.g[(0, 1)].abs() < 1e-14);

        let d = metric_partials(&chart, &p).unwrap();
        assert!((d.get(0, 1, 1) - 4.0).abs() < 1e-14);
        for (l, i, k) in [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 1, 1), (1, 0, 1)] {
            assert!(d.get(l, i, k).abs() < 1e-14);
        }

        let g = christoffel_at(&chart, &p).unwrap().gamma;
        assert!((g.get(0, 1, 1) + 2.0).abs() < 1e-14);
        assert!((g.get(1, 0, 1) - 0.5).abs() < 1e-14);
        assert_eq!(g.get(1, 0, 1), g.get(1, 1, 0));
        assert!(g.get(0, 0, 0).abs() < 1e-14);
        assert!(g.get(1, 1, 1).abs() < 1e-14);
    }

    #[test]
    fn hyperspherical_four_metric() {
        let chart = builtin_chart(ChartKind::Hyperspherical, 4).unwrap();
        assert_eq!(chart.dim(), 4);
        assert_eq!(chart.ambient_dim(), 4);
        let p = [2.0, PI / 3.0, PI / 4.0, 1.0];
        let m = metric_at(&chart, &p).unwrap();
        let expected = [1.0, 4.0, 1.0, 0.5];
        for i in 0..4 {
            for k in 0..4 {
                let want = if i == k { expected[i] } else { 0.0 };
                assert!((m.g[(i, k)] - want).abs() < 1e-10, "g[{i}][{k}] = {}", m.g[(i, k)]);
            }
        }
        for (got, want) in Chart::hyperspherical_diagonal(&p).iter().zip(expected) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn polar_compatibility_holds() {
        let chart = builtin_chart(ChartKind::Polar2, 2).unwrap();
        let geometry = PointGeometry::at(&chart, &[1.75, 0.6]).unwrap();
        assert!(compatibility_residual(&geometry) < 1e-12);
    }

    #[test]
    fn unsupported_and_out_of_domain() {
        assert!(builtin_chart(ChartKind::Polar2, 3).is_err());
        assert!(builtin_chart(ChartKind::Spherical3, 2).is_err());
        assert!(builtin_chart(ChartKind::Hyperspherical, 1).is_err());
        assert!("torus".parse::<ChartKind>().is_err());
        let chart = builtin_chart(ChartKind::Polar2, 2).unwrap();
        assert!(matches!(metric_at(&chart, &[0.0, -1.0]), Err(ChartError::OutsideDomain { .. })));
        assert!(matches!(metric_at(&chart, &[1.0]), Err(ChartError::Arity { .. })));
    }

    #[test]
    fn chart_documents() {
        let polar = r#"{"name":"polar2","coords":["r","theta"],"embedding":["r*cos(theta)","r*sin(theta)"],"domain":[[0.1,5],[0.1,6.18]]}"#;
        assert_eq!(load_chart(polar).unwrap(), builtin_chart(ChartKind::Polar2, 2).unwrap());

        let short = r#"{"name":"bad","coords":["a","b"],"embedding":["a"],"domain":[[0,1],[0,1]]}"#;
        assert!(matches!(load_chart(short), Err(ChartError::Shape { dim: 2, ambient: 1 })));

        let collinear = r#"{"name":"bad","coords":["a","b"],"embedding":["u1","u1"],"domain":[[0,1],[0,1]]}"#;
        assert!(matches!(load_chart(collinear), Err(ChartError::RankDeficient { .. })));

        let typo = r#"{"name":"bad","coords":["a","b"],"embedding":["a","c"],"domain":[[0,1],[0,1]]}"#;
        match load_chart(typo) {
            Err(ChartError::Parse { path, error }) => {
                assert_eq!(path, "embedding[1]");
                assert_eq!(error.position, 0);
            }
            other => panic!("{other:?}"),
        }

        assert!(matches!(load_chart("{}"), Err(ChartError::Schema(_))));
        let empty = r#"{"name":"bad","coords":["a"],"embedding":["a"],"domain":[[1,1]]}"#;
        assert!(matches!(load_chart(empty), Err(ChartError::Schema(_))));
    }
}
