use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polybound::spectra::{exact_spectrum, fd_spectrum};
use polybound::Domain;

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    let square = Domain::unit_square();
    let disk = Domain::unit_disk();
    for k in [200usize, 5000] {
        g.bench_with_input(BenchmarkId::new("square_lattice", k), &k, |b, &k| b.iter(|| exact_spectrum(black_box(&square), 1, k).unwrap()));
    }
    g.bench_function("disk_membrane_100", |b| b.iter(|| exact_spectrum(black_box(&disk), 1, 100).unwrap()));
    g.bench_function("disk_clamped_50", |b| b.iter(|| exact_spectrum(black_box(&disk), 2, 50).unwrap()));
    g.finish();
}

fn finite_differences(c: &mut Criterion) {
    let mut g = c.benchmark_group("finite_differences");
    g.sample_size(10);
    let square = Domain::unit_square();
    let disk = Domain::unit_disk();
    g.bench_function("square_laplacian_h64_k20", |b| b.iter(|| fd_spectrum(black_box(&square), 1, 1.0 / 64.0, 20).unwrap()));
    g.bench_function("square_bilaplacian_h32_k10", |b| b.iter(|| fd_spectrum(black_box(&square), 2, 1.0 / 32.0, 10).unwrap()));
    g.bench_function("disk_clamped_h64_k1", |b| b.iter(|| fd_spectrum(black_box(&disk), 2, 1.0 / 64.0, 1).unwrap()));
    g.finish();
}

criterion_group!(benches, exact, finite_differences);
criterion_main!(benches);
