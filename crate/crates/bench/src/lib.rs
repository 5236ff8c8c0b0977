//! Fixtures shared by the criterion benches.

use beltrami_core::{builtin_chart, Chart, ChartKind, ScalarField};

/// A mixed polynomial and trigonometric field over the chart's coordinates.
pub fn workload(chart: &Chart) -> ScalarField {
    let c = chart.coords();
    let text = match c.len() {
        1 => format!("{0}^3 + sin({0})", c[0]),
        _ => format!("{0}^2*{1} + exp({1})*cos({0}) + sin({0}*{1})", c[0], c[1]),
    };
    ScalarField::parse(&text, c).expect("workload parses")
}

/// Hyperspherical chart of dimension `n` with an interior sample point.
pub fn hyperspherical(n: usize) -> (Chart, Vec<f64>) {
    let chart = builtin_chart(ChartKind::Hyperspherical, n).expect("n >= 2");
    let mut point = vec![1.3];
    point.extend((1..n).map(|k| 0.3 + 0.1 * k as f64));
    (chart, point)
}
