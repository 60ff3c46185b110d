use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mimojam_bench::fixture_matrix;
use mimojam_core::numerics::{left_pinv, max_eigenpair};

fn pinv(c: &mut Criterion) {
    let h = fixture_matrix(4, 2, 1);
    c.bench_function("left_pinv 4x2", |b| b.iter(|| left_pinv(black_box(&h)).unwrap()));
}

fn eigen(c: &mut Criterion) {
    let h = fixture_matrix(2, 2, 2);
    let gram = &h.adjoint() * &h;
    c.bench_function("max_eigenpair 2x2", |b| {
        b.iter(|| max_eigenpair(black_box(&gram)).unwrap())
    });
}

criterion_group!(benches, pinv, eigen);
criterion_main!(benches);
