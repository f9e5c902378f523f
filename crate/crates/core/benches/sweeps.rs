//! Oracle and sampling sweeps. With the default `parallel` feature each
//! sweep runs on the global rayon pool and on a one-thread pool; build with
//! `--no-default-features` for the plain sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;

use nodehilb::oracle::{enumerate_ideals, flag_point_census, OracleConfig};
use nodehilb::par::is_parallel;
use nodehilb::suites::{chart_consistency, flatness_random, universal_samples};
use nodehilb::Field;

fn variants() -> Vec<(&'static str, Option<usize>)> {
    if is_parallel() {
        vec![("rayon", None), ("one-thread", Some(1))]
    } else {
        vec![("sequential", None)]
    }
}

fn run_in<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f),
        None => f(),
    }
}

fn sweeps(c: &mut Criterion) {
    let cfg = OracleConfig::default();
    let f3 = Field::prime(3).unwrap();
    let f5 = Field::prime(5).unwrap();
    let mut g = c.benchmark_group("sweeps");
    g.sample_size(10);
    for (name, threads) in variants() {
        g.bench_function(BenchmarkId::new("enumerate q=3 m=5", name), |b| {
            b.iter(|| run_in(threads, || enumerate_ideals(3, 5, 2, &cfg).unwrap().len()))
        });
        g.bench_function(BenchmarkId::new("flag census q=2 m=4", name), |b| {
            b.iter(|| run_in(threads, || flag_point_census(2, 4, &cfg).unwrap().chain_count))
        });
        g.bench_function(BenchmarkId::new("flatness m=4 x200", name), |b| {
            b.iter(|| run_in(threads, || flatness_random(4, f3, 4, 200, 1).passed()))
        });
        g.bench_function(BenchmarkId::new("universal m=4 x200", name), |b| {
            b.iter(|| run_in(threads, || universal_samples(4, f5, 200, 1).len()))
        });
        g.bench_function(BenchmarkId::new("chart consistency m=3 x50", name), |b| {
            b.iter(|| run_in(threads, || chart_consistency(3, f3, 50, 1).passed()))
        });
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
