//! Compares the rayon-backed mapper against its sequential twin on the two
//! workloads the experiment layer actually distributes: solution-norm
//! quadratures across a time grid, and the closed-kernel norm battery.
//! Build with `--no-default-features` to measure a build whose `map_collect`
//! is itself sequential.

use criterion::{criterion_group, criterion_main, Criterion};
use thermoplate::verifier::{kernel_norm_sweep, solution_norm, ExperimentConfig};
use thermoplate::{fit, parallel};

fn bench_solution_norms(c: &mut Criterion) {
    let cfg = ExperimentConfig::standard(3, 1.0).expect("standard config");
    let times = cfg.time_grid.clone();
    let mut group = c.benchmark_group("solution-norms-n3");
    group.sample_size(10);
    group.bench_function("map_collect", |b| {
        b.iter(|| parallel::map_collect(&times, |&t| solution_norm(t, &cfg).unwrap().value))
    });
    group.bench_function("map_collect_seq", |b| {
        b.iter(|| parallel::map_collect_seq(&times, |&t| solution_norm(t, &cfg).unwrap().value))
    });
    group.finish();
}

fn bench_kernel_battery(c: &mut Criterion) {
    let pairs: Vec<(u32, usize)> = (0..=2u32)
        .flat_map(|k| (1..=6usize).map(move |n| (k, n)))
        .collect();
    let times = fit::log_grid(1e2, 1e4, 9);
    let mut group = c.benchmark_group("kernel-norm-battery");
    group.sample_size(10);
    group.bench_function("map_collect", |b| {
        b.iter(|| {
            parallel::map_collect(&pairs, |&(k, n)| {
                kernel_norm_sweep(k, n, 0.25, &times, 1e-8).unwrap()
            })
        })
    });
    group.bench_function("map_collect_seq", |b| {
        b.iter(|| {
            parallel::map_collect_seq(&pairs, |&(k, n)| {
                kernel_norm_sweep(k, n, 0.25, &times, 1e-8).unwrap()
            })
        })
    });
    group.finish();
}

fn bench_pairwise_sum(c: &mut Criterion) {
    let xs: Vec<f64> = (0..1_000_000).map(|k| (k as f64 * 1e-3).sin()).collect();
    let mut group = c.benchmark_group("pairwise-sum-1e6");
    group.bench_function("pairwise", |b| b.iter(|| parallel::pairwise_sum(&xs)));
    group.bench_function("naive", |b| b.iter(|| xs.iter().sum::<f64>()));
    group.finish();
}

criterion_group!(
    benches,
    bench_solution_norms,
    bench_kernel_battery,
    bench_pairwise_sum
);
criterion_main!(benches);
