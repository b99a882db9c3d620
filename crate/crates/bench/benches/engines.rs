use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use eprb_bench::planar_pair;
use eprb_core::{
    estimate_correlation, quadrature_expectation, run_pair_trial, sample_uniform_sphere,
    ExperimentConfig, ModelKind, RandomSource,
};

fn sampling(c: &mut Criterion) {
    let mut rng = RandomSource::new(1, 0);
    c.bench_function("sample_uniform_sphere", |bench| {
        bench.iter(|| black_box(sample_uniform_sphere(&mut rng)))
    });
}

fn pair_trials(c: &mut Criterion) {
    let (a, b) = planar_pair(60.0);
    let mut group = c.benchmark_group("run_pair_trial");
    for model in ModelKind::ALL {
        let mut rng = RandomSource::new(2, 0);
        group.bench_function(model.name(), |bench| {
            bench.iter(|| black_box(run_pair_trial(model, &a, &b, &mut rng).unwrap()))
        });
    }
    group.finish();
}

fn correlations(c: &mut Criterion) {
    const TRIALS: u64 = 100_000;
    let mut group = c.benchmark_group("estimate_correlation");
    group.throughput(Throughput::Elements(TRIALS));
    group.sample_size(20);
    for model in ModelKind::ALL {
        let config = ExperimentConfig::at_angle(model, 60f64.to_radians(), TRIALS, 3);
        group.bench_with_input(
            BenchmarkId::from_parameter(model.name()),
            &config,
            |bench, cfg| bench.iter(|| black_box(estimate_correlation(cfg).unwrap())),
        );
    }
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let (a, b) = planar_pair(60.0);
    let mut group = c.benchmark_group("quadrature");
    group.sample_size(20);
    for side in [64usize, 256] {
        for model in [ModelKind::BellNaive, ModelKind::MatzkinConditioned] {
            let id = BenchmarkId::new(model.name(), format!("{side}x{side}"));
            group.bench_function(id, |bench| {
                bench
                    .iter(|| black_box(quadrature_expectation(model, &a, &b, side * side).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sampling, pair_trials, correlations, quadrature);
criterion_main!(benches);
