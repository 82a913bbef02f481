use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use negdep_qmc::discrepancy::{star_discrepancy_cover, star_discrepancy_exact};
use negdep_qmc::negdep::test_upper_nd;
use negdep_qmc::samplers::{sample, sample_lhs};
use negdep_qmc::{Interval, RngStream, SchemeSpec};
use std::hint::black_box;

fn samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    let specs = [
        SchemeSpec::MonteCarlo,
        SchemeSpec::LatinHypercube,
        SchemeSpec::RsjRank1Lattice,
        SchemeSpec::ScrambledNet { base: 2, m: 10, s: 2 },
    ];
    for spec in &specs {
        let (n, d) = match spec {
            SchemeSpec::RsjRank1Lattice => (1021, 2),
            _ => (1024, 2),
        };
        group.bench_with_input(BenchmarkId::from_parameter(spec.label()), spec, |b, spec| {
            let mut rng = RngStream::new(1);
            b.iter(|| sample(spec, n, d, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn exact_discrepancy(c: &mut Criterion) {
    let mut group = c.benchmark_group("star_discrepancy_exact");
    group.sample_size(20);
    for &(n, d) in &[(256, 2), (1024, 2), (64, 3), (128, 3)] {
        let points = sample_lhs(n, d, &mut RngStream::new(7));
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &points, |b, p| {
            b.iter(|| star_discrepancy_exact(black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn cover_discrepancy(c: &mut Criterion) {
    let points = sample_lhs(256, 2, &mut RngStream::new(7));
    c.bench_function("star_discrepancy_cover/d2_n256_delta0.05", |b| {
        b.iter(|| star_discrepancy_cover(black_box(&points), 0.05).unwrap())
    });
}

fn upper_nd(c: &mut Criterion) {
    let q = Interval::new(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
    let mut group = c.benchmark_group("test_upper_nd");
    group.sample_size(10);
    group.bench_function("lhs_n8_t2_r1e4", |b| {
        let mut rng = RngStream::new(3);
        b.iter(|| test_upper_nd(&SchemeSpec::LatinHypercube, 8, &q, 2, 1.0, 10_000, &mut rng).unwrap())
    });
    group.finish();
}

criterion_group!(benches, samplers, exact_discrepancy, cover_discrepancy, upper_nd);
criterion_main!(benches);
