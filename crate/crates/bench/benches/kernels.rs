use std::hint::black_box;

use circlemap::family::iterate;
use circlemap::fractal::box_count;
use circlemap::rotation::{center, compare_to_rational, locking_interval};
use circlemap::{CircleMap, CriticalFamily, LiftPoint, Rational, RotationConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn lift(c: &mut Criterion) {
    let fam = CriticalFamily::new(3).unwrap();
    let map = fam.at(0.3);
    c.bench_function("lift_once", |b| {
        b.iter(|| map.lift(black_box(LiftPoint::from_f64(0.2))))
    });
    c.bench_function("iterate_1000", |b| {
        b.iter(|| iterate(&map, black_box(LiftPoint::from_f64(0.2)), 1000))
    });
}

fn tongues(c: &mut Criterion) {
    let fam = CriticalFamily::new(3).unwrap();
    let cfg = RotationConfig::default();
    let mut g = c.benchmark_group("rotation");
    g.sample_size(10);
    for (p, q) in [(1u64, 3u64), (8, 21), (50, 127)] {
        let r = Rational::from((p, q));
        g.bench_with_input(BenchmarkId::new("center", q), &r, |b, r| {
            b.iter(|| center(&fam, r, &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("locking_interval", q), &r, |b, r| {
            b.iter(|| locking_interval(&fam, r, 1e-10, &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("compare", q), &r, |b, r| {
            b.iter(|| compare_to_rational(&fam, black_box(0.61), r, &cfg).unwrap())
        });
    }
    g.finish();
}

fn boxes(c: &mut Criterion) {
    // Gaps shaped like a removed-tongue complement: many small intervals.
    let intervals: Vec<(f64, f64)> = (0..5000)
        .map(|i| {
            let x = i as f64 / 5000.0;
            (x, x + 1e-4 * (1.0 + (i % 7) as f64))
        })
        .collect();
    c.bench_function("box_count_2^-16", |b| {
        b.iter(|| box_count(black_box(&intervals), (0.0, 1.0), 2f64.powi(-16)))
    });
}

criterion_group!(benches, lift, tongues, boxes);
criterion_main!(benches);
