use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jmgt_bench::{interval, params, rectangle, state};
use jmgt_core::multiharmonic::{solve_fixed_point, FixedPointOptions};
use jmgt_core::timedomain::{rhs, source_term, Integrator};
use jmgt_core::{ForcingSpec, Scheme};
use num_complex::Complex64;

fn nonlinear_source(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("source_term");
    for (name, basis) in [("interval-64", interval(64)), ("rectangle-16x16", rectangle(16))] {
        let s = state(basis.len());
        g.bench_function(name, |b| {
            b.iter(|| source_term(&p, &basis, black_box(&s.u), &s.ut, &s.utt, &ForcingSpec::None, 0.0).unwrap())
        });
    }
    g.finish();

    let basis = interval(64);
    let s = state(basis.len());
    c.bench_function("rhs/interval-64", |b| {
        b.iter(|| rhs(&p, &basis, black_box(&s), &ForcingSpec::None, 0.0).unwrap())
    });
}

fn integrator_step(c: &mut Criterion) {
    let p = params();
    let basis = interval(32);
    let s = state(basis.len());
    let mut g = c.benchmark_group("step/interval-32");
    for (scheme, dt) in [(Scheme::ExponentialImex, 1e-2), (Scheme::Rk4Explicit, 1e-3)] {
        let integ = Integrator::new(&p, &basis, &ForcingSpec::None, scheme, dt, 1e-3).unwrap();
        g.bench_function(scheme.as_str(), |b| b.iter(|| integ.step(black_box(&s)).unwrap()));
    }
    g.finish();
}

fn fixed_point(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("solve_fixed_point");
    g.sample_size(20);
    for harmonics in [4, 8] {
        let basis = interval(16);
        let mut row = vec![Complex64::new(0.0, 0.0); basis.len()];
        row[0] = Complex64::new(0.1, 0.0);
        row[1] = Complex64::new(0.04, 0.0);
        let opts = FixedPointOptions {
            harmonics,
            ..Default::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(harmonics), &harmonics, |b, _| {
            b.iter(|| solve_fixed_point(&p, &basis, black_box(&[row.clone()]), 1.5, &opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, nonlinear_source, integrator_step, fixed_point);
criterion_main!(benches);
