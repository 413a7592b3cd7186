//! Scattering amplitude and winding numbers.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dirac_halfplane::bulk::{chern, Band};
use dirac_halfplane::scattering::{
    chern_via_scattering, dual_winding, levinson_winding, s_value, Loop, WindingOptions,
};
use dirac_halfplane_bench::{model, references};

fn scattering_amplitude(c: &mut Criterion) {
    let p = model();
    let bc = references()[2].1;
    c.bench_function("s_value", |b| b.iter(|| s_value(&p, &bc, black_box(1.3), black_box(0.7))));
}

fn bulk_chern(c: &mut Criterion) {
    let p = model();
    c.bench_function("chern_degree", |b| b.iter(|| chern(&p, black_box(Band::Plus))));
}

fn windings(c: &mut Criterion) {
    let p = model();
    let opts = WindingOptions::default();
    let mut g = c.benchmark_group("winding");
    g.sample_size(10);
    for (name, bc) in references() {
        g.bench_function(format!("chern_loop/{name}"), |b| {
            b.iter(|| chern_via_scattering(&p, &bc, &Loop::TangentCircle { radius: 1.0 }, &opts))
        });
        g.bench_function(format!("levinson/{name}"), |b| b.iter(|| levinson_winding(&p, &bc, 1e-3, 100.0, &opts)));
        g.bench_function(format!("dual_arc/{name}"), |b| b.iter(|| dual_winding(&p, &bc, 1e-7, 0.01, &opts)));
    }
    g.finish();
}

criterion_group!(benches, scattering_amplitude, bulk_chern, windings);
criterion_main!(benches);
