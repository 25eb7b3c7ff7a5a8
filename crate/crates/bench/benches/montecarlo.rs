use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gelkit::montecarlo::simulate_run;
use gelkit::MCConfig;
use gelkit_bench::{terminated_hexa, trifunctional};

fn single_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate-run");
    group.sample_size(10);
    for n in [10_000usize, 100_000] {
        let cfg = MCConfig::new(trifunctional(), n, 0.75).with_seed(1);
        group.bench_with_input(BenchmarkId::new("f3-0.75", n), &cfg, |b, cfg| {
            b.iter(|| simulate_run(black_box(cfg), 0))
        });
        let cfg = MCConfig::new(terminated_hexa(), n, 0.97).with_seed(1);
        group.bench_with_input(BenchmarkId::new("f1f6-0.97", n), &cfg, |b, cfg| {
            b.iter(|| simulate_run(black_box(cfg), 0))
        });
    }
    group.finish();
}

criterion_group!(benches, single_run);
criterion_main!(benches);
