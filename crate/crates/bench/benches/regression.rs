use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};

use segsurp_bench::synth_rows;
use segsurp_core::evaluation::cross_validate;
use segsurp_core::regression::{delta_loglik, fit_ols, full_predictors};

fn bench_fit(c: &mut Criterion) {
    let rows = synth_rows(2000, 5);
    let preds = full_predictors(1);
    let mut group = c.benchmark_group("regression");
    group.throughput(Throughput::Elements(rows.len() as u64));
    group.bench_function("fit_ols_2000x6", |b| {
        b.iter(|| fit_ols(black_box(&rows), &preds).unwrap())
    });
    group.bench_function("delta_loglik_2000x6", |b| {
        b.iter(|| {
            delta_loglik(
                black_box(&rows),
                &segsurp_core::regression::baseline_predictors(1),
                &preds,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn bench_crossval(c: &mut Criterion) {
    let rows = synth_rows(2000, 6);
    let mut group = c.benchmark_group("evaluation");
    group.throughput(Throughput::Elements(rows.len() as u64));
    group.bench_function("cross_validate_10fold", |b| {
        b.iter(|| cross_validate(black_box(&rows), 1, 10).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_fit, bench_crossval);
criterion_main!(benches);
