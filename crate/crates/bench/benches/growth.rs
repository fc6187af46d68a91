use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigUint;
use wvlab_bench::sqrt_exp_fixture;
use wvlab_core::experiments::kahane_search;
use wvlab_core::{
    gen_geometric, max_modulus_with, phase_angle, CoefficientSequence, GrowthProfile, MaxModOptions, PhaseFraction,
    Radius, Rotation, SeriesOptions,
};

fn growth_profile(c: &mut Criterion) {
    let mut g = c.benchmark_group("growth_profile");
    let seq = CoefficientSequence::sqrt_exp();
    for s in [1e-2, 1e-3, 1e-4] {
        let r = Radius::from_gap(s).unwrap();
        let o = SeriesOptions {
            n_cap: 100_000_000,
            ..SeriesOptions::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(s), &r, |b, &r| {
            b.iter(|| GrowthProfile::compute(&seq, black_box(r), &o).unwrap())
        });
    }
    g.finish();
}

fn max_modulus(c: &mut Criterion) {
    let mut g = c.benchmark_group("max_modulus_rotated");
    g.sample_size(10);
    for s in [1e-2, 10f64.powf(-2.5)] {
        let f = sqrt_exp_fixture(s);
        let rot = Rotation::Phases {
            theta: &f.theta,
            u: &f.u,
        };
        g.bench_function(BenchmarkId::from_parameter(s), |b| {
            b.iter(|| max_modulus_with(&f.seq, rot, black_box(&f.profile), &MaxModOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn phase_reduction(c: &mut Criterion) {
    let theta: BigUint = (BigUint::from(1u32) << 4096u32) + 12345u32;
    let u = PhaseFraction::from_f64(0.123456789, 4096 + 128).unwrap();
    c.bench_function("phase_angle_4096_bit", |b| {
        b.iter(|| phase_angle(black_box(&theta), &u))
    });
}

fn kahane(c: &mut Criterion) {
    let theta = gen_geometric(2.0, 20).unwrap();
    let coeffs = vec![1.0; 20];
    c.bench_function("kahane_search_20_terms", |b| {
        b.iter(|| kahane_search(&theta, black_box(&coeffs), 0.1, 0.2, 1 << 14).unwrap())
    });
}

criterion_group!(benches, growth_profile, max_modulus, phase_reduction, kahane);
criterion_main!(benches);
