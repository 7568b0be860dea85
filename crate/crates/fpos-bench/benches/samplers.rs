//! Rank-based order-statistic generation against the sample-and-sort
//! baseline, across rank counts, plus the kilosort calibration itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fpos::sampler::{kilosort_unit, naive_sample_order_stats, sample_order_stats};
use fpos::SimulationRequest;
use fpos_bench::{identity_population, spread_ranks};

fn bench_methods(c: &mut Criterion) {
    let mut group = c.benchmark_group("order_stats_1000_sims");
    for rank_count in [1u64, 6, 20] {
        let req = SimulationRequest::new(
            identity_population(40),
            20,
            spread_ranks(20, rank_count),
            1000,
        )
        .unwrap();
        group.bench_with_input(
            BenchmarkId::new("rank_based", rank_count),
            &req,
            |b, req| {
                let mut rng = ChaCha8Rng::seed_from_u64(1);
                b.iter(|| sample_order_stats(req, &mut rng));
            },
        );
        group.bench_with_input(
            BenchmarkId::new("sample_and_sort", rank_count),
            &req,
            |b, req| {
                let mut rng = ChaCha8Rng::seed_from_u64(1);
                b.iter(|| naive_sample_order_stats(req, &mut rng));
            },
        );
    }
    group.finish();
}

fn bench_large_population(c: &mut Criterion) {
    // the regime the rank-based method is built for: few ranks, huge N
    let req = SimulationRequest::new(identity_population(100_000), 50_000, vec![100, 25_000], 100)
        .unwrap();
    c.bench_function("rank_based_100k_population_100_sims", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        b.iter(|| sample_order_stats(&req, &mut rng));
    });
}

fn bench_kilosort(c: &mut Criterion) {
    c.bench_function("kilosort_calibration", |b| b.iter(kilosort_unit));
}

criterion_group!(
    benches,
    bench_methods,
    bench_large_population,
    bench_kilosort
);
criterion_main!(benches);
