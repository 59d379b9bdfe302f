use bimap_bench::{bitext, tokenized};
use bimap_core::{gsa_align, lcs_length, run_simr, GsaOptions, MatchConfig, Params};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn lcs(c: &mut Criterion) {
    c.bench_function("lcs 12x12", |b| {
        b.iter(|| lcs_length(black_box("parlementaire"), black_box("parliamentary")))
    });
}

fn trace(c: &mut Criterion) {
    let p = Params::default();
    let cfg = MatchConfig::cognates(p.lcsr_threshold);
    let mut g = c.benchmark_group("map");
    g.sample_size(10);
    for chars in [10_000, 40_000] {
        let (x, y) = tokenized(&bitext(1, chars));
        g.bench_with_input(BenchmarkId::from_parameter(chars), &chars, |b, _| {
            b.iter(|| run_simr(&x, &y, &cfg, &p.simr, true).unwrap())
        });
    }
    g.finish();
}

fn align(c: &mut Criterion) {
    let p = Params::default();
    let mut g = c.benchmark_group("align");
    for chars in [50_000, 200_000] {
        let s = bitext(2, chars);
        let (x, y) = tokenized(&s);
        let out = run_simr(&x, &y, &MatchConfig::cognates(p.lcsr_threshold), &p.simr, true).unwrap();
        let points: Vec<_> = out.chains().flat_map(|c| c.points.clone()).collect();
        let grid = s.grid();
        let opts = GsaOptions::new(p.min_confidence);
        g.bench_with_input(BenchmarkId::from_parameter(chars), &chars, |b, _| {
            b.iter(|| gsa_align(&points, &grid, &opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lcs, trace, align);
criterion_main!(benches);
