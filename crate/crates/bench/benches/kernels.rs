use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use renyite_bench::{driven_pair, gaussian_cloud};
use renyite_core::dynamics::{integrate_coupled, RosslerParams};
use renyite_core::{entropy_ensemble, knn_table, rte, rte_effective, EstimatorConfig, LagSpec, SurrogateKind};

fn knn(c: &mut Criterion) {
    let mut group = c.benchmark_group("knn_table");
    group.sample_size(10);
    for dim in [1, 3] {
        let cloud = gaussian_cloud(20_000, dim, 1);
        group.bench_with_input(BenchmarkId::new("n20000_rank50", dim), &cloud, |b, cloud| {
            b.iter(|| knn_table(black_box(cloud), 50).unwrap())
        });
    }
    group.finish();
}

fn ensemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("entropy_ensemble");
    group.sample_size(10);
    let cloud = gaussian_cloud(20_000, 2, 2);
    for alpha in [0.8, 1.0, 1.5] {
        let cfg = EstimatorConfig::with_alpha(alpha);
        group.bench_with_input(BenchmarkId::new("n20000_dim2", alpha), &cfg, |b, cfg| {
            b.iter(|| entropy_ensemble(black_box(&cloud), cfg).unwrap())
        });
    }
    group.finish();
}

fn transfer(c: &mut Criterion) {
    let mut group = c.benchmark_group("transfer_entropy");
    group.sample_size(10);
    let (x, y) = driven_pair(5_000, 3);
    let spec = LagSpec::new(vec![0, 1], 1, vec![0]).unwrap();
    let cfg = EstimatorConfig::with_alpha(1.0);
    group.bench_function("rte_n5000", |b| b.iter(|| rte(black_box(&x), black_box(&y), &spec, &cfg).unwrap()));
    group.bench_function("rte_effective_n5000_s5", |b| {
        b.iter(|| rte_effective(black_box(&x), black_box(&y), &spec, &cfg, SurrogateKind::Shuffle, 5, 7).unwrap())
    });
    group.finish();
}

fn integrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_coupled");
    group.sample_size(10);
    let params = RosslerParams::with_epsilon(0.1);
    group.bench_function("t2000_dt0.1", |b| {
        b.iter(|| integrate_coupled(black_box(&params), 100.0, 2000.0, 0.1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, knn, ensemble, transfer, integrate);
criterion_main!(benches);
