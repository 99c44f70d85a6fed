use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use quatgin_core::{complex_adjoint, eigenvalues, sample_ginibre_quaternion, EnsembleConfig};

fn bench_adjoint_eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("adjoint_eigenvalues");
    group.sample_size(10);
    for n in [25, 50, 100, 300] {
        let a = sample_ginibre_quaternion(EnsembleConfig { n, seed: 1 }).unwrap();
        let m = complex_adjoint(&a).into_matrix();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| eigenvalues(black_box(m)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_adjoint_eigenvalues);
criterion_main!(benches);
