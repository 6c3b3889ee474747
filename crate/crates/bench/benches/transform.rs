use cardwave::{derive_filters, dwt_analyze, dwt_synthesize};
use cardwave_bench::system;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn dwt(c: &mut Criterion) {
    let mut g = c.benchmark_group("dwt");
    let mut rng = StdRng::seed_from_u64(1);
    for m in [2, 4] {
        let fp = derive_filters(&system(m), 1e-9).unwrap();
        for n in [1usize << 10, 1 << 14] {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            g.throughput(Throughput::Elements(n as u64));
            g.bench_with_input(BenchmarkId::new(format!("analyze/m{m}"), n), &x, |b, x| {
                b.iter(|| dwt_analyze(&fp, x, 5).unwrap())
            });
            let bands = dwt_analyze(&fp, &x, 5).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("synthesize/m{m}"), n), &bands, |b, r| {
                b.iter(|| dwt_synthesize(&fp, r).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, dwt);
criterion_main!(benches);
