use std::hint::black_box;

use boundwidth::convert::{circuit_to_bp, cut_to_bounded_width, valiant_cut};
use boundwidth::sat::{bounded_width_sat, brute_force_sat, EnumerationBackend, SatCaps, SatOptions};
use boundwidth_bench::{deep, layered, random};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn lowering(c: &mut Criterion) {
    let mut group = c.benchmark_group("circuit_to_bp");
    for w in [2, 3, 4] {
        let lc = layered(w as u64, 8, 2, 60, w);
        group.bench_with_input(BenchmarkId::from_parameter(w), &lc, |b, lc| {
            b.iter(|| circuit_to_bp(black_box(lc)).unwrap())
        });
    }
    group.finish();
}

fn depth_reduction(c: &mut Criterion) {
    let circuit = deep(3, 12, 200, 16);
    c.bench_function("valiant_cut/s200_d16", |b| b.iter(|| valiant_cut(black_box(&circuit), 8)));
    let cut = valiant_cut(&circuit, 8);
    c.bench_function("cut_to_bounded_width/s200_d16", |b| {
        b.iter(|| cut_to_bounded_width(black_box(&circuit), &cut).unwrap())
    });
}

fn satisfiability(c: &mut Criterion) {
    let mut group = c.benchmark_group("sat");
    let circuit = random(5, 14, 2, 40);
    group.bench_function("brute", |b| b.iter(|| brute_force_sat(black_box(&circuit), SatCaps::default()).unwrap()));
    group.bench_function("width", |b| {
        b.iter(|| bounded_width_sat(black_box(&circuit), &EnumerationBackend, SatOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, lowering, depth_reduction, satisfiability);
criterion_main!(benches);
