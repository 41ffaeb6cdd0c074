use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::f64::consts::FRAC_PI_4;

use jcesd_core::{uniform_grid, BellSpec, Engine, Execution, ModelParams, TruncationPolicy};

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("concurrence_series");
    group.sample_size(10);
    let bell = BellSpec::anti_correlated(FRAC_PI_4);
    let times = uniform_grid(30.0, 1500).unwrap();
    for &(g, n_tr) in &[(0.3, 32), (1.0, 64)] {
        let p = ModelParams::resonant(g, 0.0);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let engine = Engine::new(TruncationPolicy::fixed(n_tr)).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), g), &p, |b, p| {
                b.iter(|| engine.concurrence_series(p, p, &bell, &times).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, series);
criterion_main!(benches);
