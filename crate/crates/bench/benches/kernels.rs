use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use witsenhausen::bounds::{lower_finite, upper_lattice};
use witsenhausen::scalar_exact::{exact_total_cost, mmse_estimate};
use witsenhausen::sim::simulate;
use witsenhausen::specfn::psi;
use witsenhausen::{
    Decoder, FirstStage, Lattice, LatticeKind, ProblemParams, ScalarStrategy, SecondStage, StrategyConfig,
};

fn special_functions(c: &mut Criterion) {
    c.bench_function("psi m=8 r=3", |b| b.iter(|| psi(black_box(8), black_box(3.0))));
    c.bench_function("psi m=64 r=9", |b| b.iter(|| psi(black_box(64), black_box(9.0))));
}

fn lattices(c: &mut Criterion) {
    let hex = Lattice::new(LatticeKind::HexagonalA2, 2, 1.3).unwrap();
    let mut out = [0.0; 2];
    c.bench_function("hex quantize", |b| {
        b.iter(|| hex.quantize_into(black_box(&[0.37, -2.91]), &mut out))
    });
}

fn bounds(c: &mut Criterion) {
    let p = ProblemParams::from_k_sigma0(1, 0.2, 5.0).unwrap();
    c.bench_function("upper bound m=1", |b| b.iter(|| upper_lattice(black_box(&p), 1.0)));
    c.bench_function("finite-length lower bound m=1", |b| b.iter(|| lower_finite(black_box(&p))));
}

fn scalar(c: &mut Criterion) {
    let s = ScalarStrategy::new(4.0, 0.1, 5.0).unwrap();
    c.bench_function("mmse estimate", |b| b.iter(|| mmse_estimate(&s, black_box(1.7))));
    let mut g = c.benchmark_group("exact cost");
    g.sample_size(20);
    g.bench_function("slopey mmse", |b| b.iter(|| exact_total_cost(&s, 0.04, Decoder::Mmse)));
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let p = ProblemParams::from_k_sigma0(2, 0.3, 4.0).unwrap();
    let l = Lattice::for_power(LatticeKind::HexagonalA2, 2, 2.0).unwrap();
    let s = StrategyConfig::new(FirstStage::LatticeQuantize(l), SecondStage::PackingSphere);
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("hex packing-sphere 1e5", |b| b.iter(|| simulate(&p, &s, 100_000, 1)));
    g.finish();
}

criterion_group!(benches, special_functions, lattices, bounds, scalar, monte_carlo);
criterion_main!(benches);
