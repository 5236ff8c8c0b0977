use std::hint::black_box;

use beltrami_bench::{hyperspherical, workload};
use beltrami_core::charts::christoffel_at;
use beltrami_core::{check_identity, delta2, CheckConfig, IdentityId, PsiVariant};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn jets(c: &mut Criterion) {
    let mut group = c.benchmark_group("jet2");
    for n in [2, 4, 8] {
        let (chart, p) = hyperspherical(n);
        let field = workload(&chart);
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| field.eval_jet2(black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn geometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("christoffel");
    for n in [2, 4, 8] {
        let (chart, p) = hyperspherical(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| christoffel_at(&chart, black_box(p)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("delta2");
    for n in [2, 4, 8] {
        let (chart, p) = hyperspherical(n);
        let field = workload(&chart);
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| delta2(&field, &chart, black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_identity");
    group.sample_size(10);
    let config = CheckConfig { seed: 42, samples: 200, tol: 1e-9, psi: PsiVariant::Corrected };
    for (id, n) in [(IdentityId::Prop1, 4), (IdentityId::Thm3, 6)] {
        let (chart, _) = hyperspherical(n);
        group.bench_function(format!("{id}@hyperspherical{n}"), |b| {
            b.iter(|| check_identity(id, &chart, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, jets, geometry, identities);
criterion_main!(benches);
