use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarmdiff::dynamics::{linspace, mdl_blend, MacroParams};
use swarmdiff::fit::{fit_observations, Observations};
use swarmdiff::sim::{detect_encounters, detect_encounters_brute, World, HOUR};
use swarmdiff::{FitContext, SimConfig};

fn positions(n: usize, arena: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.random_range(0.0..arena), rng.random_range(0.0..arena)))
        .collect()
}

fn encounters(c: &mut Criterion) {
    let mut g = c.benchmark_group("detect_encounters");
    for n in [20usize, 200, 2000] {
        let pts = positions(n, 200.0, n as u64);
        g.bench_with_input(BenchmarkId::new("grid", n), &pts, |b, p| {
            b.iter(|| detect_encounters(black_box(p), 10.0))
        });
        if n <= 200 {
            g.bench_with_input(BenchmarkId::new("brute", n), &pts, |b, p| {
                b.iter(|| detect_encounters_brute(black_box(p), 10.0))
            });
        }
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulation");
    g.sample_size(10);
    let cfg = SimConfig {
        duration: HOUR,
        msg_window: HOUR,
        ..SimConfig::default()
    };
    g.bench_function("one_hour_defaults", |b| {
        b.iter(|| {
            let mut w = World::new(cfg.clone()).unwrap();
            for _ in 0..cfg.ticks() {
                w.step().unwrap();
            }
            black_box(w.finish())
        })
    });
    g.finish();
}

fn fitting(c: &mut Criterion) {
    let p = MacroParams::for_swarm(20, 0.4, 1500.0, 0.0);
    let t = linspace(0.0, 12_000.0, 1000);
    let informed = t.iter().map(|&x| mdl_blend(x, &p)).collect();
    let obs = Observations { t, informed };
    let ctx = FitContext {
        n: 20,
        tau_ref: 1700.0,
        dt: 1.0,
    };
    let mut g = c.benchmark_group("fit");
    g.sample_size(10);
    g.bench_function("mdl_1000_points", |b| {
        b.iter(|| fit_observations(black_box(&obs), &ctx, 0.0).unwrap())
    });
    g.finish();
}

criterion_group!(benches, encounters, simulation, fitting);
criterion_main!(benches);
