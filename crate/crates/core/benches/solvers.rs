use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use timebin_core::analysis::{bell_scan_with, ScanGrid};
use timebin_core::params::{derive, PhysicalParams};
use timebin_core::propagation::{
    default_step_count, solve_analytic_with, solve_numeric_with, Channel, Frame, InputPulse,
    TimeGrid,
};
use timebin_core::Execution;

const POLICIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn numeric(c: &mut Criterion) {
    let d = derive(&PhysicalParams::rb85_reference()).unwrap();
    let pulse = InputPulse::gaussian(2e-9, Channel::One);
    let steps = default_step_count(&d);
    let mut group = c.benchmark_group("numeric");
    for n_t in [1024, 4096, 16384] {
        let grid = TimeGrid::for_pulse(&d, &pulse, n_t, 5.0, Frame::Comoving).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n_t), &grid, |b, grid| {
                b.iter(|| solve_numeric_with(&d, &pulse, grid, steps, &[], exec).unwrap())
            });
        }
    }
    group.finish();
}

fn analytic(c: &mut Criterion) {
    let d = derive(&PhysicalParams::rb85_reference()).unwrap();
    let pulse = InputPulse::gaussian(2e-9, Channel::One);
    let grid = TimeGrid::for_pulse(&d, &pulse, 1024, 5.0, Frame::Comoving).unwrap();
    let mut group = c.benchmark_group("analytic");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| solve_analytic_with(&d, &pulse, &grid, d.length, exec).unwrap())
        });
    }
    group.finish();
}

fn bell(c: &mut Criterion) {
    let grid = ScanGrid {
        step: 0.002,
        ..ScanGrid::default()
    };
    let mut group = c.benchmark_group("bell_scan");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| bell_scan_with(&grid, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, numeric, analytic, bell);
criterion_main!(benches);
