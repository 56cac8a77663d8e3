use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use semilevel_bench::StepFixture;
use semilevel_core::high_resolution::high_resolution_in_sweep_step;
use semilevel_core::schemes_2d::assemble_third_order_2d;
use semilevel_core::{
    case, dense_oracle_solve, run_case, scan_max_magnitude, sweep_solve, CaseId, CrossTermVariant,
    Dim, FrozenStencil, LimiterParams, RunConfig, ScanConfig, Scheme, SchemeKind, SweepSchedule,
};

fn third_order_2d(c: &mut Criterion) {
    let fx = StepFixture::new(CaseId::Ex2dCircleShrink, 128, 13.5);
    let inp = fx.inputs();
    let schedule = SweepSchedule::alternating(Dim::Two);
    c.bench_function("assemble third 2d I=128", |b| {
        b.iter(|| assemble_third_order_2d(black_box(&inp), CrossTermVariant::Symmetric).unwrap())
    });
    let system = assemble_third_order_2d(&inp, CrossTermVariant::Symmetric).unwrap();
    c.bench_function("8 sweeps third 2d I=128", |b| {
        b.iter(|| sweep_solve(black_box(&system), &inp.initial_guess(), 8, &schedule).unwrap())
    });
}

fn hr_in_sweep_2d(c: &mut Criterion) {
    let fx = StepFixture::new(CaseId::Ex2dSquareShrink, 128, 13.5);
    let inp = fx.inputs();
    let schedule = SweepSchedule::alternating(Dim::Two);
    c.bench_function("hr in-sweep step 2d I=128", |b| {
        b.iter(|| {
            high_resolution_in_sweep_step(black_box(&inp), 8, &schedule, LimiterParams::default())
                .unwrap()
        })
    });
}

fn oracle(c: &mut Criterion) {
    let fx = StepFixture::new(CaseId::Ex2dCircleShrink, 24, 13.5);
    let inp = fx.inputs();
    let system = assemble_third_order_2d(&inp, CrossTermVariant::Symmetric).unwrap();
    c.bench_function("dense oracle I=24", |b| {
        b.iter(|| dense_oracle_solve(black_box(&system), &inp.initial_guess()).unwrap())
    });
}

fn full_run(c: &mut Criterion) {
    let smooth = case(CaseId::Ex1dSmooth);
    let config = RunConfig::new(&smooth, Scheme::Third, 1600, 8);
    c.bench_function("run ex1d-smooth third I=1600", |b| {
        b.iter(|| run_case(black_box(&smooth), &config).unwrap())
    });
}

fn scan(c: &mut Criterion) {
    let stencil = FrozenStencil::new(SchemeKind::ThirdOrder, Dim::Two);
    let config = ScanConfig {
        courant_samples: 8,
        theta_samples: 64,
        refine_rounds: 2,
        ..ScanConfig::up_to(50.0)
    };
    c.bench_function("scan third 2d 8x64", |b| {
        b.iter(|| scan_max_magnitude(black_box(&stencil), &config).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = third_order_2d, hr_in_sweep_2d, oracle, full_run, scan
}
criterion_main!(benches);
