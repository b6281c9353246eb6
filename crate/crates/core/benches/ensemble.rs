//! Parallel vs sequential ensemble throughput.
//!
//! `run_ensemble` uses rayon when the default `parallel` feature is on;
//! `run_ensemble_sequential` is the always-sequential fallback. Built
//! without default features both paths are sequential and should tie.
//!
//! Run: `cargo bench -p episense`

use criterion::{criterion_group, criterion_main, Criterion};
use episense::epidemic::{
    run_ensemble, run_ensemble_sequential, DiseaseModel, SeedSpec, SimulationConfig,
};
use episense::graph::generate_citylike;
use episense::sensors::{score_nodes, Scoring};
use std::hint::black_box;

fn bench_ensemble(c: &mut Criterion) {
    let net = generate_citylike(2_000, 30.0, 7).unwrap();
    let model = DiseaseModel::seir(4.2e-5, 0.5, 0.25).unwrap();
    let cfg = SimulationConfig {
        seeds: SeedSpec::Count(5),
        horizon: 80,
        rng_seed: 11,
    };
    let runs = 32;

    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_ensemble(&net, &model, &cfg, runs).unwrap()))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run_ensemble_sequential(&net, &model, &cfg, runs).unwrap()))
    });
    group.finish();
}

fn bench_scoring(c: &mut Criterion) {
    let net = generate_citylike(2_000, 30.0, 7).unwrap();
    let model = DiseaseModel::seir(4.2e-5, 0.5, 0.25).unwrap();
    let cfg = SimulationConfig {
        seeds: SeedSpec::Count(5),
        horizon: 80,
        rng_seed: 11,
    };
    let ens = run_ensemble(&net, &model, &cfg, 32).unwrap();

    let mut group = c.benchmark_group("scoring");
    group.sample_size(10);
    group.bench_function("tree_depth", |b| {
        b.iter(|| black_box(score_nodes(&ens.dendrograms, Scoring::TreeDepth)))
    });
    group.bench_function("dominator_depth", |b| {
        b.iter(|| black_box(score_nodes(&ens.dendrograms, Scoring::DominatorDepth)))
    });
    group.finish();
}

criterion_group!(benches, bench_ensemble, bench_scoring);
criterion_main!(benches);
