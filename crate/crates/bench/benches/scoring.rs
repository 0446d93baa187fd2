use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use triplescore::kg::build_index;
use triplescore::metrics::kendall_tau_b;
use triplescore::stacker::fit_ridge;
use triplescore::starpath::{scc_score, NlQuery, SwmConfig};
use triplescore::Iri;
use triplescore_bench::{class_graph, regression, score_pairs, subject_graph};

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("entail_closure");
    for n in [1_000, 10_000] {
        let triples = class_graph(n, 50, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &triples, |b, t| {
            b.iter(|| build_index(black_box(t.clone())).entail_closure())
        });
    }
    group.finish();
}

fn path_matching(c: &mut Criterion) {
    let s = Iri::new("e:s").unwrap();
    let q = NlQuery::new("United States of America").unwrap();
    let cfg = SwmConfig::default();
    let mut group = c.benchmark_group("scc_score");
    for n in [10, 100] {
        let scc = build_index(subject_graph(n, 2)).scc(&s);
        group.bench_with_input(BenchmarkId::from_parameter(n), &scc, |b, scc| {
            b.iter(|| scc_score(black_box(scc), &q, &cfg))
        });
    }
    group.finish();
}

fn ridge(c: &mut Criterion) {
    let (x, y) = regression(1_000, 3);
    c.bench_function("fit_ridge/1000", |b| {
        b.iter(|| fit_ridge(black_box(&x), black_box(&y), 1e-8))
    });
}

fn kendall(c: &mut Criterion) {
    let (p, t) = score_pairs(10_000, 4);
    c.bench_function("kendall_tau_b/10000", |b| {
        b.iter(|| kendall_tau_b(black_box(&p), black_box(&t)))
    });
}

criterion_group!(benches, closure, path_matching, ridge, kendall);
criterion_main!(benches);
