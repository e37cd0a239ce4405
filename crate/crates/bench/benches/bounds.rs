use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use polybound::bounds::{compare_bounds, evaluate, BoundRequest, Family};
use polybound::lemmas::{moment_inequality_sweep, polynomial_sweep};
use polybound::report::{run_verify, VerifyConfig};
use polybound::spectra::Method;
use polybound::Domain;

fn formulas(c: &mut Criterion) {
    let req = BoundRequest::new(4, 2, 2.0, 0.7, 1000).unwrap().with_q(0.5).with_p(0.5);
    c.bench_function("evaluate_every_family", |b| {
        b.iter(|| Family::ALL.iter().map(|&f| evaluate(f, black_box(&req)).map(|v| v.value).unwrap_or(0.0)).sum::<f64>())
    });
    let ks: Vec<u64> = (1..=1000).collect();
    c.bench_function("compare_eigen_sum_families_1000k", |b| b.iter(|| compare_bounds(&Family::EIGEN_SUM, black_box(&req), &ks).unwrap()));
}

fn verification(c: &mut Criterion) {
    let families = vec![Family::BerezinLiYau, Family::Melas, Family::YolcuYolcu, Family::MainThm];
    let cfg = VerifyConfig::new(Domain::unit_square(), 1, 1..=200, families, Method::ExactLattice);
    c.bench_function("verify_square_200", |b| b.iter(|| run_verify(black_box(&cfg)).unwrap()));
}

fn lemma_sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("lemma_sweeps");
    g.sample_size(10);
    g.bench_function("polynomial_10000", |b| b.iter(|| polynomial_sweep(black_box(42), 10_000)));
    g.bench_function("moment_1000", |b| b.iter(|| moment_inequality_sweep(black_box(42), 1000, 1.0)));
    g.finish();
}

criterion_group!(benches, formulas, verification, lemma_sweeps);
criterion_main!(benches);
