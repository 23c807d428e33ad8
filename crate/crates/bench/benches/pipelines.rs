//! Criterion benchmarks for the heavy paths: the minor-expansion identity
//! engine, series classification, the full m = 2 battery, and the
//! commutant laboratory solves.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use koopman_bench::{engineered_spec, power_law_spec, random_matrices};
use koopman_core::commlab;
use koopman_core::identities::det_i_plus_xtx;
use koopman_core::irred::irreducibility_verdict;
use koopman_core::ortho::canonical_battery_m2;
use koopman_core::series::{classify_series, partial_sums, SeriesKind};
use koopman_core::{ClassifyPolicy, Grids};
use std::hint::black_box;

fn bench_identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("identities");
    for m in [4usize, 6, 8] {
        let mats = random_matrices(1, m, 32);
        group.bench_function(format!("det_i_plus_xtx_m{m}"), |b| {
            let mut i = 0usize;
            b.iter(|| {
                i = (i + 1) % mats.len();
                black_box(det_i_plus_xtx(&mats[i]))
            })
        });
    }
    group.finish();
}

fn bench_series(c: &mut Criterion) {
    let policy = ClassifyPolicy::default();
    let spec = power_law_spec(4096);
    let mut group = c.benchmark_group("series");
    group.bench_function("partial_sums_sl12_4096", |b| {
        b.iter(|| black_box(partial_sums(&spec, &SeriesKind::SL { k: 1, j: 2 }, 4096).unwrap()))
    });
    group.bench_function("classify_sigma1_symbolic", |b| {
        b.iter(|| {
            black_box(
                classify_series(&spec, &SeriesKind::Sigma1 { s: 2.0 }, 4096, &policy).unwrap(),
            )
        })
    });
    group.finish();
}

fn bench_battery(c: &mut Criterion) {
    let policy = ClassifyPolicy::default();
    let grids = Grids::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(20);
    let engineered = engineered_spec(4096);
    group.bench_function("battery_m2_engineered", |b| {
        b.iter(|| black_box(canonical_battery_m2(&engineered, 4096, &grids, &policy).unwrap()))
    });
    let power = power_law_spec(2048);
    group.bench_function("irreducibility_power_law", |b| {
        b.iter(|| black_box(irreducibility_verdict(&power, 2048, &grids, &policy).unwrap()))
    });
    group.finish();
}

fn bench_commlab(c: &mut Criterion) {
    let mut group = c.benchmark_group("commlab");
    group.sample_size(20);
    group.bench_function("dixmier_s3", |b| {
        b.iter_batched(
            commlab::s3_group_table,
            |table| black_box(commlab::dixmier_check(&table).unwrap()),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("schur_weyl_2x3", |b| {
        b.iter(|| black_box(commlab::schur_weyl_check(2, 3).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_identities,
    bench_series,
    bench_battery,
    bench_commlab
);
criterion_main!(benches);
