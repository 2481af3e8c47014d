use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gaplab::ratio::{self, DRule, LpBackend, TourBackend};
use gaplab::{exact, gline, mincut, subtour};
use gaplab_bench::{half_integral_weights, instance};

fn held_karp(c: &mut Criterion) {
    let mut group = c.benchmark_group("held_karp");
    group.sample_size(10);
    for n in [3usize, 4, 5] {
        let inst = instance(n, 4.0);
        group.bench_with_input(BenchmarkId::from_parameter(3 * n), &inst, |b, inst| {
            b.iter(|| exact::held_karp_with_cap(black_box(inst), 20).unwrap())
        });
    }
    group.finish();
}

fn subtour_lp(c: &mut Criterion) {
    let mut group = c.benchmark_group("subtour_lp");
    group.sample_size(10);
    for n in [6usize, 10, 18] {
        let inst = instance(n, (n as f64 - 1.0).sqrt());
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| subtour::solve_subtour_lp(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn stoer_wagner(c: &mut Criterion) {
    let mut group = c.benchmark_group("stoer_wagner");
    for n in [10usize, 30, 100] {
        let w = half_integral_weights(n, 4.0);
        group.bench_with_input(BenchmarkId::from_parameter(3 * n), &w, |b, w| {
            b.iter(|| mincut::stoer_wagner(black_box(w)))
        });
    }
    group.finish();
}

fn zvector(c: &mut Criterion) {
    c.bench_function("optimal_zvector/10000", |b| {
        b.iter(|| gline::optimal_zvector(black_box(10_000), 99.99).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let ns: Vec<usize> = (18..=2000).step_by(2).collect();
    c.bench_function("sweep/sqrt-n-1/992", |b| {
        b.iter(|| ratio::sweep(black_box(&ns), DRule::SqrtNMinus1, LpBackend::ClosedForm, TourBackend::ZVector))
    });
}

criterion_group!(benches, held_karp, subtour_lp, stoer_wagner, zvector, sweep);
criterion_main!(benches);
