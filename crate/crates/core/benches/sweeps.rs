use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use thermopress::dynamics::{mp_pressure_curve, MpMap};
use thermopress::measures::LocallyConstantPotential;
use thermopress::par::Execution;
use thermopress::star::level_set_spectrum;
use thermopress::symbolic::Sft;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn mp_curve(c: &mut Criterion) {
    let map = MpMap::new(0.5).unwrap();
    let grid: Vec<f64> = (0..=30).map(|i| -1.0 + 0.1 * i as f64).collect();
    let mut g = c.benchmark_group("mp_pressure_curve");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 16), &exec, |b, &exec| {
            b.iter(|| mp_pressure_curve(&map, black_box(&grid), 16, exec).unwrap())
        });
    }
    g.finish();
}

fn level_spectrum(c: &mut Criterion) {
    let full = Sft::full(3);
    let phi = LocallyConstantPotential::pair_values(
        &full,
        &[vec![0.0, 0.3, 1.0], vec![0.7, 0.2, 0.5], vec![0.1, 0.9, 0.4]],
    )
    .unwrap();
    let zero = LocallyConstantPotential::zero(&full);
    let alphas: Vec<f64> = (0..=200).map(|i| 0.05 + 0.0045 * i as f64).collect();
    let mut g = c.benchmark_group("level_set_spectrum");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, alphas.len()), &exec, |b, &exec| {
            b.iter(|| level_set_spectrum(&full, &phi, &zero, black_box(&alphas), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, mp_curve, level_spectrum);
criterion_main!(benches);
