//! Shared fixtures for the criterion benches.

use segrel_core::{
    build_graph, compute_tfidf, generate_synthetic, top_n_filter, CoGraph, Corpus, FilteredSegments, SyntheticSpec,
    TfidfTable, WeightingScheme,
};

/// A planted-topic corpus with `segs` segments per topic and some overlap.
pub fn corpus(segs: usize) -> Corpus {
    generate_synthetic(&SyntheticSpec { segments_per_topic: segs, overlap_fraction: 0.3, ..Default::default() })
        .expect("valid spec")
}

pub struct Stages {
    pub corpus: Corpus,
    pub table: TfidfTable,
    pub filtered: FilteredSegments,
    pub graph: CoGraph,
}

pub fn stages(segs: usize, top_n: usize) -> Stages {
    let corpus = corpus(segs);
    let table = compute_tfidf(&corpus).expect("tfidf");
    let filtered = top_n_filter(&table, top_n).expect("filter");
    let graph = build_graph(&filtered, &table, WeightingScheme::CountPlusAvgTfidf).expect("graph");
    Stages { corpus, table, filtered, graph }
}
