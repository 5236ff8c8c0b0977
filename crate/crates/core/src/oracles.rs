//! Reference computations built only from metric values and field
//! gradients, for cross-checking the jet-based geometry.

use crate::beltrami::BeltramiError;
use crate::charts::{metric_at, Chart};
use crate::expr::ScalarField;
use crate::jets::ComplexScalar;

/// Weights of the fourth-order central first-derivative stencil at
/// offsets `−2h, −h, h, 2h`.
const STENCIL: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];

/// True when every stencil point `point ± 2h e_k` lies in the chart domain.
pub fn stencil_fits(chart: &Chart, point: &[f64], h: f64) -> bool {
    chart
        .domain()
        .iter()
        .zip(point)
        .all(|(d, &u)| d.contains(u - 2.0 * h) && d.contains(u + 2.0 * h))
}

fn shifted(point: &[f64], k: usize, t: f64) -> Vec<f64> {
    let mut p = point.to_vec();
    p[k] += t;
    p
}

/// `∂_l g_ik` by central differences of the metric, indexed `[l][i][k]`.
pub fn fd_metric_partials(chart: &Chart, point: &[f64], h: f64) -> Result<Vec<Vec<Vec<f64>>>, BeltramiError> {
    let n = chart.dim();
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for (l, slab) in out.iter_mut().enumerate() {
        for (offset, w) in STENCIL {
            let g = metric_at(chart, &shifted(point, l, offset * h))?.g;
            for i in 0..n {
                for k in 0..n {
                    slab[i][k] += w * g[(i, k)] / h;
                }
            }
        }
    }
    Ok(out)
}

/// `Γ^i_kl` from finite-difference metric partials, indexed `[i][k][l]`.
pub fn fd_christoffel(chart: &Chart, point: &[f64], h: f64) -> Result<Vec<Vec<Vec<f64>>>, BeltramiError> {
    let n = chart.dim();
    let dg = fd_metric_partials(chart, point, h)?;
    let g_inv = metric_at(chart, point)?.g_inv;
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for (i, gi) in gamma.iter_mut().enumerate() {
        for k in 0..n {
            for l in 0..n {
                gi[k][l] = 0.5
                    * (0..n)
                        .map(|m| g_inv[(i, m)] * (dg[k][m][l] + dg[l][k][m] - dg[m][k][l]))
                        .sum::<f64>();
            }
        }
    }
    Ok(gamma)
}

/// `Δ2Φ = (1/√|g|) ∂_i(√|g| g^ij ∂_jΦ)`, with the flux differentiated by a
/// five-point stencil of step `h`.
pub fn divergence_delta2(
    field: &ScalarField,
    chart: &Chart,
    point: &[f64],
    h: f64,
) -> Result<ComplexScalar, BeltramiError> {
    let n = chart.dim();
    let flux = |p: &[f64], i: usize| -> Result<ComplexScalar, BeltramiError> {
        let metric = metric_at(chart, p)?;
        let grad = field.eval_jet2(p)?.gradient().to_vec();
        let root = metric.g.determinant().sqrt();
        Ok((0..n).map(|j| metric.g_inv[(i, j)] * grad[j]).sum::<ComplexScalar>() * root)
    };
    let mut div = ComplexScalar::new(0.0, 0.0);
    for i in 0..n {
        for (offset, w) in STENCIL {
            div += flux(&shifted(point, i, offset * h), i)? * (w / h);
        }
    }
    Ok(div / metric_at(chart, point)?.g.determinant().sqrt())
}
