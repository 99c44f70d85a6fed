use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use quatgin_core::potential_theory::{quad_potential, quad_potential_disk, CircleMeasureDensity};
use quatgin_core::Complex64;

fn bench_potentials(c: &mut Criterion) {
    let nu = CircleMeasureDensity::nu();
    let inside = Complex64::new(0.3, 0.4);
    let on_circle = Complex64::from_polar(1.0, 0.7);
    c.bench_function("nu_potential_inside", |b| b.iter(|| quad_potential(&nu, black_box(inside), 1e-11).unwrap()));
    c.bench_function("nu_potential_on_circle", |b| {
        b.iter(|| quad_potential(&nu, black_box(on_circle), 1e-7).unwrap())
    });
    c.bench_function("disk_potential_inside", |b| b.iter(|| quad_potential_disk(black_box(inside), 1e-10).unwrap()));
}

criterion_group!(benches, bench_potentials);
criterion_main!(benches);
