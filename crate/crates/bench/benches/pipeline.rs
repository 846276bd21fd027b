use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use segrel_bench::stages;
use segrel_core::{build_graph, compute_tfidf, top_n_filter, CommunityAlgorithm, WeightingScheme};

fn preprocessing(c: &mut Criterion) {
    let mut group = c.benchmark_group("preprocessing");
    for segs in [10, 40] {
        let s = stages(segs, 50);
        group.bench_with_input(BenchmarkId::new("tfidf", segs), &s.corpus, |b, corpus| {
            b.iter(|| compute_tfidf(black_box(corpus)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("top_n_filter", segs), &s.table, |b, table| {
            b.iter(|| top_n_filter(black_box(table), 50).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("build_graph", segs), &s, |b, s| {
            b.iter(|| build_graph(black_box(&s.filtered), &s.table, WeightingScheme::CountPlusAvgTfidf).unwrap())
        });
    }
    group.finish();
}

fn communities(c: &mut Criterion) {
    let mut group = c.benchmark_group("communities");
    group.sample_size(20);
    let s = stages(20, 50);
    for algo in [
        CommunityAlgorithm::LabelPropagation,
        CommunityAlgorithm::Cnm,
        CommunityAlgorithm::Louvain,
        CommunityAlgorithm::Walktrap,
    ] {
        group.bench_function(algo.name(), |b| b.iter(|| algo.detect(black_box(&s.graph), 0, 4).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, preprocessing, communities);
criterion_main!(benches);
