use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use rampart_bench::benchmark_dataset;
use rampart_core::{
    compute_schedule, rbo, run_ramp, run_rampart, Allocation, RampParams, RankerSpec,
};

fn bench_ramp(c: &mut Criterion) {
    let synth = benchmark_dataset(500, 100);
    let pool: Vec<usize> = (0..100).collect();
    let mut g = c.benchmark_group("ramp_ols");
    for budget in [200usize, 1000] {
        g.throughput(Throughput::Elements(budget as u64));
        g.bench_with_input(BenchmarkId::from_parameter(budget), &budget, |b, &budget| {
            let params = RampParams::new(budget, 60, 10, 42);
            b.iter(|| run_ramp(&synth.dataset, &pool, &RankerSpec::OlsCoef, &params).unwrap());
        });
    }
    g.finish();
}

fn bench_rampart(c: &mut Criterion) {
    let synth = benchmark_dataset(500, 128);
    let schedule = compute_schedule(128, 8, 8, 1600, Allocation::Uniform).unwrap();
    c.bench_function("rampart_ols_128", |b| {
        b.iter(|| {
            run_rampart(&synth.dataset, &RankerSpec::OlsCoef, &schedule, 60, 8, 8, 42).unwrap()
        });
    });
}

fn bench_tree_patch(c: &mut Criterion) {
    let synth = benchmark_dataset(500, 100);
    let pool: Vec<usize> = (0..100).collect();
    let params = RampParams::new(200, 125, 10, 42);
    c.bench_function("ramp_tree_mdi_200", |b| {
        b.iter(|| run_ramp(&synth.dataset, &pool, &RankerSpec::tree_mdi(), &params).unwrap());
    });
}

fn bench_rbo(c: &mut Criterion) {
    let est: Vec<usize> = (0..100).collect();
    let truth: Vec<usize> = (0..100).rev().collect();
    c.bench_function("rbo_k100", |b| {
        b.iter(|| rbo(&est, &truth, 0.9, 100).unwrap());
    });
}

criterion_group!(benches, bench_ramp, bench_rampart, bench_tree_patch, bench_rbo);
criterion_main!(benches);
