use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use eikotomo::eikonal::{forward_sinogram, solve_eikonal, SolverOptions};
use eikotomo::reconstruct::{reconstruct_two_step, TwoStepOptions};
use eikotomo::transforms::{fbp_parallel, radon, radon_adjoint, FilterSpec};
use eikotomo_bench::{geometry, inclusions};

fn eikonal(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_eikonal");
    for h in [0.02, 0.01] {
        let f = inclusions(h);
        group.bench_with_input(BenchmarkId::from_parameter(h), &f, |b, f| {
            b.iter(|| solve_eikonal(black_box(f), [0.75, 0.0], SolverOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn transforms(c: &mut Criterion) {
    let f = inclusions(0.01);
    let grid = *f.grid();
    let p = radon(&f, 180, 161, 0.75).unwrap();
    c.bench_function("radon 180x161", |b| b.iter(|| radon(black_box(&f), 180, 161, 0.75).unwrap()));
    c.bench_function("radon_adjoint 180x161", |b| b.iter(|| radon_adjoint(black_box(&p), &grid)));
    let spec = FilterSpec::scaling(None);
    c.bench_function("fbp_parallel 180x161", |b| b.iter(|| fbp_parallel(black_box(&p), &grid, &spec).unwrap()));
}

fn two_step(c: &mut Criterion) {
    let f = inclusions(0.02);
    let grid = *f.grid();
    let p = forward_sinogram(&f, &geometry(18, 153), SolverOptions::default()).unwrap();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("two_step h=0.02", |b| {
        b.iter(|| reconstruct_two_step(black_box(&p), &grid, &TwoStepOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eikonal, transforms, two_step);
criterion_main!(benches);
