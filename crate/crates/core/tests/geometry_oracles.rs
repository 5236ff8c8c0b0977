use beltrami_core::charts::{christoffel_at, compatibility_residual, metric_at, metric_partials};
use beltrami_core::oracles::{fd_christoffel, fd_metric_partials, stencil_fits};
use beltrami_core::{builtin_chart, Chart, ChartKind, PointGeometry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_builtins() -> Vec<Chart> {
    let mut charts = vec![
        builtin_chart(ChartKind::Euclidean, 2).unwrap(),
        builtin_chart(ChartKind::Euclidean, 3).unwrap(),
        builtin_chart(ChartKind::Polar2, 2).unwrap(),
        builtin_chart(ChartKind::Spherical3, 3).unwrap(),
    ];
    charts.extend((2..=8).map(|n| builtin_chart(ChartKind::Hyperspherical, n).unwrap()));
    charts
}

fn interior_points(chart: &Chart, seed: u64, count: usize, h: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let p = chart.sample_point(&mut rng);
        if stencil_fits(chart, &p, h) {
            points.push(p);
        }
    }
    points
}

#[test]
fn hyperspherical_metric_is_the_cosine_cascade() {
    for n in 2..=8 {
        let chart = builtin_chart(ChartKind::Hyperspherical, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..50 {
            let p = chart.sample_point(&mut rng);
            let g = metric_at(&chart, &p).unwrap().g;
            let mut want = p[0] * p[0];
            for i in 0..n {
                let diag = if i == 0 { 1.0 } else { want };
                assert!((g[(i, i)] - diag).abs() <= 1e-10 * diag, "N={n} g[{i}][{i}] at {p:?}");
                if i >= 1 && i + 1 < n {
                    want *= p[i].cos().powi(2);
                }
                for k in 0..n {
                    if k != i {
                        assert!(g[(i, k)].abs() < 1e-10, "N={n} g[{i}][{k}] = {}", g[(i, k)]);
                    }
                }
            }
        }
    }
}

#[test]
fn metric_partials_match_finite_differences() {
    let h = 1e-3;
    for chart in all_builtins() {
        for p in interior_points(&chart, 11, 20, h) {
            let exact = metric_partials(&chart, &p).unwrap();
            let fd = fd_metric_partials(&chart, &p, h).unwrap();
            let n = chart.dim();
            for l in 0..n {
                for i in 0..n {
                    for k in 0..n {
                        let (a, b) = (exact.get(l, i, k), fd[l][i][k]);
                        assert!((a - b).abs() <= 1e-7 * (1.0 + a.abs()), "{} ∂{l}g{i}{k}: {a} vs {b}", chart.name());
                    }
                }
            }
        }
    }
}

#[test]
fn christoffel_symbols_match_finite_differences() {
    let h = 1e-3;
    for chart in all_builtins() {
        for p in interior_points(&chart, 12, 20, h) {
            let exact = christoffel_at(&chart, &p).unwrap().gamma;
            let fd = fd_christoffel(&chart, &p, h).unwrap();
            let n = chart.dim();
            for i in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let (a, b) = (exact.get(i, k, l), fd[i][k][l]);
                        assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{} Γ{i}{k}{l}: {a} vs {b}", chart.name());
                    }
                }
            }
        }
    }
}

#[test]
fn christoffel_symbols_are_metric_compatible() {
    for chart in all_builtins() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let p = chart.sample_point(&mut rng);
            let geometry = PointGeometry::at(&chart, &p).unwrap();
            let r = compatibility_residual(&geometry);
            assert!(r < 1e-8, "{} at {p:?}: {r}", chart.name());
        }
    }
}

#[test]
fn polar_christoffel_symbols() {
    let chart = builtin_chart(ChartKind::Polar2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let p = chart.sample_point(&mut rng);
        let gamma = christoffel_at(&chart, &p).unwrap().gamma;
        let r = p[0];
        assert!((gamma.get(0, 1, 1) + r).abs() < 1e-9);
        assert!((gamma.get(1, 0, 1) - 1.0 / r).abs() < 1e-9);
        assert!((gamma.get(1, 1, 0) - 1.0 / r).abs() < 1e-9);
        assert!(gamma.get(0, 0, 0).abs() < 1e-12 && gamma.get(1, 1, 1).abs() < 1e-12);
    }
}

#[test]
fn euclidean_geometry_is_flat() {
    for n in [2, 3] {
        let chart = builtin_chart(ChartKind::Euclidean, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let p = chart.sample_point(&mut rng);
            let geometry = PointGeometry::at(&chart, &p).unwrap();
            assert!(geometry.partials.max_abs() == 0.0);
            assert!(geometry.christoffel.gamma.max_abs() == 0.0);
        }
    }
}
