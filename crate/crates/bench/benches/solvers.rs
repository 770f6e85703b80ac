use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use subdiff_core::elliptic::{assemble, default_mode_count, eigensystem, EllipticCoefficients, SpaceGrid, Subdomain};
use subdiff_core::inverse_cg::{add_noise, reconstruct, ForwardMap, InverseConfig};
use subdiff_core::pde_solver::{solve_forward_l1, solve_forward_spectral, SourceSpec};
use subdiff_core::transform_kernels::kernel_row;
use subdiff_core::{ContourSpec, MultiTermSpec, TimeGrid, TimeSeries};

fn setup() -> (MultiTermSpec, SpaceGrid, TimeGrid) {
    let spec = MultiTermSpec::new(vec![(1.0, 0.8), (0.5, 0.3)]).unwrap();
    (spec, SpaceGrid::unit(50).unwrap(), TimeGrid::new(1.0, 50).unwrap())
}

fn forward(c: &mut Criterion) {
    let (spec, sg, tg) = setup();
    let op = assemble(&sg, &EllipticCoefficients::laplacian()).unwrap();
    let eig = eigensystem(&op, default_mode_count(&sg)).unwrap();
    let contour = ContourSpec::for_spec(&spec);
    let u0 = sg.sample(|x| (PI * x).sin());
    let src = SourceSpec::new(TimeSeries::from_fn(tg, |t| 10.0 * t * (1.0 - t)), u0.clone()).unwrap();
    c.bench_function("l1 50x50", |b| {
        b.iter(|| solve_forward_l1(&spec, &op, black_box(&u0), &src, tg).unwrap())
    });
    c.bench_function("spectral 50x50", |b| {
        b.iter(|| solve_forward_spectral(&spec, &eig, black_box(&u0), &src, tg, &contour).unwrap())
    });
    let taus: Vec<f64> = (1..=40).map(|k| k as f64 / 40.0).collect();
    c.bench_function("kernel row 40", |b| {
        b.iter(|| kernel_row(&spec, &contour, black_box(0.5), &taus).unwrap())
    });
}

fn inversion(c: &mut Criterion) {
    let (spec, space, time) = setup();
    let cfg = InverseConfig {
        spec,
        space,
        coefficients: EllipticCoefficients::laplacian(),
        time,
        f: space.sample(|x| (PI * x).sin()),
        omega: Subdomain::interval(0.4, 0.6).unwrap(),
        lambda_reg: 1e-5,
        epsilon: 1e-3,
        max_iters: 100,
        g0: TimeSeries::zeros(time),
        seed: 1,
        delta: 0.01,
    };
    let truth = TimeSeries::from_fn(time, |t| 10.0 * t * (1.0 - t));
    let data = add_noise(&ForwardMap::new(&cfg).unwrap().apply(&truth).unwrap(), cfg.delta, cfg.seed).unwrap();
    c.bench_function("forward map build", |b| b.iter(|| ForwardMap::new(black_box(&cfg)).unwrap()));
    c.bench_function("cg reconstruction", |b| {
        b.iter(|| reconstruct(black_box(&cfg), &data, None).unwrap())
    });
}

criterion_group!(benches, forward, inversion);
criterion_main!(benches);
