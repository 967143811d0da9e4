use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use quasi1d::continuum::{continuum_sum, Well};
use quasi1d::twobody::{build_kernel, solve_scattering_length, KernelParams, SpectralKernel};
use quasi1d::{solve_transverse, u_cir, ChannelCutoff, TrapSpec};

fn transverse(c: &mut Criterion) {
    let spec = TrapSpec::harmonic(1e-3, 200);
    c.bench_function("transverse harmonic 401 sites", |b| b.iter(|| solve_transverse(black_box(&spec)).unwrap()));
    let spectrum = solve_transverse(&spec).unwrap();
    c.bench_function("u_cir harmonic 401 sites", |b| b.iter(|| u_cir(black_box(&spectrum), 0.0, ChannelCutoff::All).unwrap()));
}

fn continuum(c: &mut Criterion) {
    let well = Well::from_spec(&TrapSpec::delta_well(2.0, 1)).unwrap();
    let e0 = 2.0 - 8f64.sqrt();
    c.bench_function("continuum sum delta well", |b| b.iter(|| continuum_sum(black_box(&well), e0, 0.0).unwrap()));
}

fn two_body(c: &mut Criterion) {
    let spectrum = solve_transverse(&TrapSpec::harmonic_complete(1e-3, 41).unwrap()).unwrap();
    c.bench_function("kernel build Nc=41", |b| b.iter(|| build_kernel(black_box(&spectrum), KernelParams::new(41)).unwrap()));
    let kernel = build_kernel(&spectrum, KernelParams::new(41)).unwrap();
    c.bench_function("direct solve Nc=41", |b| b.iter(|| solve_scattering_length(black_box(&kernel), -4.0).unwrap()));
    c.bench_function("spectral setup Nc=41", |b| b.iter(|| SpectralKernel::new(black_box(&kernel))));
    let spectral = SpectralKernel::new(&kernel);
    c.bench_function("spectral point Nc=41", |b| b.iter(|| spectral.u1d(black_box(-4.0)).unwrap()));
}

criterion_group!(benches, transverse, continuum, two_body);
criterion_main!(benches);
