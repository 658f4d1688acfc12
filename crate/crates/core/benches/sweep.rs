use std::path::PathBuf;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use poc_mobility::algebra::RelationPolicy;
use poc_mobility::generate::random_mechanisms;
use poc_mobility::mechfile::parse_file;
use poc_mobility::mobility::{analyze_batch, analyze_mechanism};
use poc_mobility::oracle::{check_agreement, check_agreement_sequential, seed_list, DEFAULT_SEED};
use poc_mobility::par;
use poc_mobility::relation::build_relation_graph;

fn oracle_seeds(c: &mut Criterion) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/tricept.mech");
    let mech = parse_file(&std::fs::read_to_string(path).unwrap()).unwrap().mechanism;
    let report = analyze_mechanism(&mech, RelationPolicy::GeneralPosition).unwrap();
    let g = build_relation_graph(&mech).unwrap();
    let seeds = seed_list(DEFAULT_SEED, 64);

    let mut group = c.benchmark_group("oracle tricept 64 seeds");
    group.bench_function("rayon", |b| {
        b.iter(|| check_agreement(black_box(&report), &mech, &g, &seeds))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| check_agreement_sequential(black_box(&report), &mech, &g, &seeds))
    });
    group.finish();
}

fn batch_analysis(c: &mut Criterion) {
    let mechs = random_mechanisms(2017, 256);
    let mut group = c.benchmark_group("analyze 256 random mechanisms");
    group.bench_function("rayon", |b| {
        b.iter(|| analyze_batch(black_box(&mechs), RelationPolicy::GeneralPosition))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            par::map_sequential(black_box(&mechs), |m| analyze_mechanism(m, RelationPolicy::GeneralPosition))
        })
    });
    group.finish();
}

criterion_group!(benches, oracle_seeds, batch_analysis);
criterion_main!(benches);
