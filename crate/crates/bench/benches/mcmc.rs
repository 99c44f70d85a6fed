use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use quatgin_core::loggas::{mcmc_run, McmcConfig, Potential};
use quatgin_core::RandomStream;

fn bench_chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("mcmc_10k_steps");
    for n in [4, 16, 64] {
        let mut cfg = McmcConfig::new(n, 10_000);
        cfg.burnin = 0;
        cfg.thin = 1_000;
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| mcmc_run(cfg, &Potential::Canonical, &mut RandomStream::new(3)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_chain);
criterion_main!(benches);
