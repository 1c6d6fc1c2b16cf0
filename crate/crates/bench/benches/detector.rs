use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gaitpipe_core::detect::{detect_steps, smooth_uniform, DetectorParams};
use gaitpipe_core::match_events;
use gaitpipe_core::synth::{generate, GaitScenario};

fn bench_detector_params(c: &mut Criterion) {
    let mut sc = GaitScenario::symmetric(0.4, 2.0, 15.0, 7);
    sc.noise_sigma_m = 0.01;
    let (seq, _) = generate(&sc).unwrap();

    let mut group = c.benchmark_group("detect_steps");
    for kernel_width in [3usize, 5, 7, 9] {
        for alpha in [0.1f64, 0.2, 0.4] {
            let params = DetectorParams { kernel_width, alpha, ..DetectorParams::default() };
            let id = BenchmarkId::from_parameter(format!("k{kernel_width}_a{alpha}"));
            group.bench_with_input(id, &params, |b, params| {
                b.iter(|| detect_steps(black_box(&seq), params).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_smoothing(c: &mut Criterion) {
    let signal: Vec<f64> = (0..10_000).map(|i| ((i as f64) * 0.37).sin().abs()).collect();
    let mut group = c.benchmark_group("smooth_uniform");
    for width in [3usize, 5, 9, 15] {
        group.bench_with_input(BenchmarkId::from_parameter(width), &width, |b, &w| {
            b.iter(|| smooth_uniform(black_box(&signal), w).unwrap())
        });
    }
    group.finish();
}

fn bench_matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("match_events");
    for n in [10usize, 100, 1000] {
        let predicted: Vec<usize> = (0..n).map(|i| i * 17 + 3).collect();
        let truth: Vec<usize> = (0..n + 5).map(|i| i * 17).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| match_events(black_box(&predicted), black_box(&truth)))
        });
    }
    group.finish();
}

fn bench_generation(c: &mut Criterion) {
    let mut sc = GaitScenario::symmetric(0.35, 2.0, 10.0, 11);
    sc.noise_sigma_m = 0.01;
    c.bench_function("generate_10s_walk", |b| b.iter(|| generate(black_box(&sc)).unwrap()));
}

criterion_group!(benches, bench_detector_params, bench_smoothing, bench_matching, bench_generation);
criterion_main!(benches);
