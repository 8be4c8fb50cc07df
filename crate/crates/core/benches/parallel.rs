//! Data-parallel core against a one-thread pool on the same workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mixturecraft::analysis::{sup_norm_diff_on_grid, Convolution};
use mixturecraft::constructor::{build_partition, discretize, truncate};
use mixturecraft::{BoxRegion, DensitySpec};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![
        (format!("default-pool-{}", default.current_num_threads()), default),
        ("single-thread-pool".to_string(), single),
    ]
}

fn bench(c: &mut Criterion) {
    let f = DensitySpec::parse("gmix:0.5,-1,0.5,0.5,1,0.5").unwrap();
    let g = DensitySpec::parse("gaussian:0,1").unwrap();
    let h = truncate(&f, &BoxRegion::interval(-3.0, 3.0).unwrap(), 1.0, 0.5).unwrap();
    let k = 8.0;
    let part = build_partition(h.r, k, 0.01, 1).unwrap();
    let grid = BoxRegion::interval(-h.r, h.r).unwrap().grid(2049).unwrap();

    let mut group = c.benchmark_group("discretize");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| discretize(&h, &g, k, &part, 1e-4, 8, 1e-14).unwrap()))
        });
    }
    group.finish();

    let (mix, _) = discretize(&h, &g, k, &part, 1e-4, 8, 1e-14).unwrap();
    let index = mix.index();
    let conv = Convolution::new(&g, k, &h).unwrap();
    let mut group = c.benchmark_group("convolution_sup_norm");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&name), |b| {
            b.iter(|| pool.install(|| sup_norm_diff_on_grid(&conv, &index, &grid).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
