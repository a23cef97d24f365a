use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use boxmagic::polylog::{li, phi1, phi2};
use boxmagic::quadrature::{integrate, QuadratureSpec};
use boxmagic::C64;

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("normalization");
    g.sample_size(10);
    for n in [8, 16, 32] {
        let spec = QuadratureSpec::u2(1.0, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &spec, |b, spec| {
            b.iter(|| integrate(spec, |p| p.point.norm().powi(-2)).unwrap())
        });
    }
    g.finish();
}

fn polylog(c: &mut Criterion) {
    c.bench_function("li3/series", |b| b.iter(|| li(3, black_box(C64::new(0.2, 0.3))).unwrap()));
    c.bench_function("li3/integral", |b| b.iter(|| li(3, black_box(C64::new(-0.6, 0.7))).unwrap()));
    c.bench_function("phi1", |b| b.iter(|| phi1(black_box(0.1), black_box(0.2)).unwrap()));
    c.bench_function("phi2", |b| b.iter(|| phi2(black_box(0.1), black_box(0.2)).unwrap()));
}

criterion_group!(benches, quadrature, polylog);
criterion_main!(benches);
