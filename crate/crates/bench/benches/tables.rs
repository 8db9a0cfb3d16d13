use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geostark_bench::{corpus, table};
use geostark_core::discretize::{accuracy_eval, StrategyKind};
use geostark_core::harness::QuerySample;

fn build(c: &mut Criterion) {
    let zones = corpus();
    let mut group = c.benchmark_group("build_table");
    group.sample_size(10);
    for strategy in StrategyKind::all() {
        for r in [16u32, 64] {
            group.bench_with_input(BenchmarkId::new(strategy.name(), r), &r, |b, &r| b.iter(|| table(&zones, strategy, r)));
        }
    }
    group.finish();
}

fn accuracy(c: &mut Criterion) {
    let zones = corpus();
    let sample = QuerySample::draw(&zones.bbox(), 4000, 42);
    let mut group = c.benchmark_group("accuracy_eval");
    group.sample_size(10);
    for strategy in StrategyKind::all() {
        let bundle = table(&zones, strategy, 32);
        group.bench_function(strategy.name(), |b| b.iter(|| accuracy_eval(&zones, &bundle, &sample.points)));
    }
    group.finish();
}

criterion_group!(benches, build, accuracy);
criterion_main!(benches);
