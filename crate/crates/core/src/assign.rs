//! Segment-to-community mapping.
//!
//! A segment is represented by the set of its top-n filtered words and goes
//! to the community with the highest score. Two segments are equivalent when
//! they end up in the same cluster.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::cograph::CoGraph;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::tfidf::{FilteredSegments, TfidfTable};

pub type WordSet = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoringFunction {
    /// Overlap normalized by community size.
    ScoreC,
    /// Overlap normalized by segment size.
    ScoreSeg,
    /// tf-idf mass of the overlap over the segment's tf-idf mass.
    ScoreTfidf,
}

impl ScoringFunction {
    pub const ALL: [ScoringFunction; 3] = [
        ScoringFunction::ScoreC,
        ScoringFunction::ScoreSeg,
        ScoringFunction::ScoreTfidf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoringFunction::ScoreC => "score_c",
            ScoringFunction::ScoreSeg => "score_seg",
            ScoringFunction::ScoreTfidf => "score_tfidf",
        }
    }
}

impl std::fmt::Display for ScoringFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoringFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "score_c" | "c" => Ok(Self::ScoreC),
            "score_seg" | "seg" => Ok(Self::ScoreSeg),
            "score_tfidf" | "tfidf" => Ok(Self::ScoreTfidf),
            _ => Err(Error::InvalidParameter(format!("unknown scoring function {s:?}"))),
        }
    }
}

fn overlap(a: &WordSet, b: &WordSet) -> usize {
    a.intersection(b).count()
}

/// `|seg ∩ c| / |c|`.
pub fn score_c(seg: &WordSet, community: &WordSet) -> Result<f64> {
    if community.is_empty() {
        return Err(Error::InvalidParameter("empty community".into()));
    }
    Ok(overlap(seg, community) as f64 / community.len() as f64)
}

/// `|seg ∩ c| / |seg|`, 0 for an empty segment.
pub fn score_seg(seg: &WordSet, community: &WordSet) -> f64 {
    if seg.is_empty() {
        0.0
    } else {
        overlap(seg, community) as f64 / seg.len() as f64
    }
}

/// Share of the segment's tf-idf mass that falls in `community`; `value`
/// gives the tf-idf of a word within this segment. 0 when the segment has no
/// positive mass.
pub fn score_tfidf<F: Fn(usize) -> f64>(seg: &WordSet, community: &WordSet, value: F) -> f64 {
    let total: f64 = seg.iter().map(|&w| value(w)).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let shared: f64 = seg.intersection(community).map(|&w| value(w)).sum();
    shared / total
}

/// Word communities expressed as tf-idf vocabulary ids.
pub fn communities_as_word_sets(
    graph: &CoGraph,
    communities: &Partition,
    table: &TfidfTable,
) -> Result<Vec<WordSet>> {
    communities.check_len(graph.node_count())?;
    let mut sets = vec![WordSet::new(); communities.k()];
    for (node, &c) in communities.labels().iter().enumerate() {
        let word = table.word_id(graph.label(node)).ok_or_else(|| {
            Error::InvalidParameter(format!("graph word {:?} is not in the vocabulary", graph.label(node)))
        })?;
        sets[c].insert(word);
    }
    Ok(sets)
}

/// Assigns every segment to its best community (smallest index on ties).
///
/// Segments scoring 0 against every community get their own singleton
/// clusters, numbered after the community-derived clusters. With no
/// communities at all every segment is a singleton.
pub fn assign_segments(
    filtered: &FilteredSegments,
    communities: &[WordSet],
    scoring: ScoringFunction,
    table: &TfidfTable,
) -> Result<Partition> {
    let c = communities.len();
    let mut orphans = 0;
    let mut labels = Vec::with_capacity(filtered.segment_count());
    for seg in 0..filtered.segment_count() {
        let words: WordSet = filtered.kept(seg).iter().copied().collect();
        let mut best = None;
        let mut best_score = 0.0;
        for (i, community) in communities.iter().enumerate() {
            let s = match scoring {
                ScoringFunction::ScoreC => score_c(&words, community)?,
                ScoringFunction::ScoreSeg => score_seg(&words, community),
                ScoringFunction::ScoreTfidf => {
                    score_tfidf(&words, community, |w| table.value_at(w, seg))
                }
            };
            if s > best_score {
                best_score = s;
                best = Some(i);
            }
        }
        labels.push(best.unwrap_or_else(|| {
            orphans += 1;
            c + orphans - 1
        }));
    }
    Ok(Partition::from_labels(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cograph::{build_graph, WeightingScheme};
    use crate::corpus::{Corpus, Document, Segment};
    use crate::tfidf::{compute_tfidf, top_n_filter};
    use proptest::prelude::*;

    fn set(ws: &[usize]) -> WordSet {
        ws.iter().copied().collect()
    }

    #[test]
    fn score_c_examples() {
        let seg = set(&[0, 1, 2]);
        assert_eq!(score_c(&seg, &set(&[1, 2, 3, 4])).unwrap(), 0.5);
        assert_eq!(score_c(&seg, &seg).unwrap(), 1.0);
        assert_eq!(score_c(&seg, &set(&[7])).unwrap(), 0.0);
        assert!(score_c(&seg, &WordSet::new()).is_err());
    }

    #[test]
    fn score_seg_examples() {
        let seg = set(&[0, 1, 2]);
        assert!((score_seg(&seg, &set(&[1, 2, 3, 4])) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(score_seg(&seg, &set(&[0, 1, 2, 9])), 1.0);
        assert_eq!(score_seg(&seg, &set(&[8])), 0.0);
        assert_eq!(score_seg(&WordSet::new(), &set(&[8])), 0.0);
    }

    #[test]
    fn score_tfidf_examples() {
        let values = [2.0, 1.0, 1.0];
        let v = |w: usize| values[w];
        let seg = set(&[0, 1, 2]);
        assert_eq!(score_tfidf(&seg, &set(&[0, 1, 2]), v), 1.0);
        assert_eq!(score_tfidf(&seg, &set(&[5]), v), 0.0);
        assert_eq!(score_tfidf(&seg, &set(&[0, 5]), v), 0.5);
        assert_eq!(score_tfidf(&seg, &set(&[0]), |_| 0.0), 0.0);
    }

    fn corpus(texts: &[&str]) -> Corpus {
        let segs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Segment::new(format!("s{i}"), "d", *t, None))
            .collect();
        Corpus::new(vec![Document { id: "d".into(), media: "t".into() }], segs).unwrap()
    }

    #[test]
    fn two_topics_agree_under_every_function() {
        let c = corpus(&[
            "avl tree rotation",
            "film actor",
            "avl rotation",
            "actor",
        ]);
        let t = compute_tfidf(&c).unwrap();
        let f = top_n_filter(&t, 100).unwrap();
        let id = |w: &str| t.word_id(w).unwrap();
        let communities = vec![
            set(&[id("avl"), id("tree"), id("rotation")]),
            set(&[id("film"), id("actor")]),
        ];
        for sf in ScoringFunction::ALL {
            let p = assign_segments(&f, &communities, sf, &t).unwrap();
            assert_eq!(p.cluster_of(2), p.cluster_of(0), "{sf}");
            assert_eq!(p.cluster_of(3), p.cluster_of(1), "{sf}");
            assert_ne!(p.cluster_of(2), p.cluster_of(3), "{sf}");
        }
    }

    #[test]
    fn single_community_takes_everything() {
        let c = corpus(&["w b", "b c", "c w"]);
        let t = compute_tfidf(&c).unwrap();
        let f = top_n_filter(&t, 100).unwrap();
        let all: WordSet = (0..t.vocabulary().len()).collect();
        let p = assign_segments(&f, &[all], ScoringFunction::ScoreC, &t).unwrap();
        assert_eq!(p.k(), 1);
    }

    #[test]
    fn unmatched_segments_become_trailing_singletons() {
        let c = corpus(&["w b", "x", "", "w c"]);
        let t = compute_tfidf(&c).unwrap();
        let f = top_n_filter(&t, 100).unwrap();
        let g = build_graph(&f, &t, WeightingScheme::Count).unwrap();
        let comm = Partition::single_cluster(g.node_count());
        let sets = communities_as_word_sets(&g, &comm, &t).unwrap();
        let p = assign_segments(&f, &sets, ScoringFunction::ScoreSeg, &t).unwrap();
        assert_eq!(p.labels(), &[0, 1, 2, 0]);
    }

    #[test]
    fn no_communities_means_singletons() {
        let c = corpus(&["w b", "b c"]);
        let t = compute_tfidf(&c).unwrap();
        let f = top_n_filter(&t, 1).unwrap();
        let p = assign_segments(&f, &[], ScoringFunction::ScoreC, &t).unwrap();
        assert_eq!(p.labels(), &[0, 1]);
    }

    proptest! {
        #[test]
        fn scores_in_unit_interval_and_scale_invariant(
            seg in prop::collection::btree_set(0usize..12, 0..8),
            comm in prop::collection::btree_set(0usize..12, 1..8),
            values in prop::collection::vec(0.0f64..5.0, 12),
            scale in 0.1f64..100.0,
        ) {
            let v = |w: usize| values[w];
            for s in [
                score_c(&seg, &comm).unwrap(),
                score_seg(&seg, &comm),
                score_tfidf(&seg, &comm, v),
            ] {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
            }
            let a = score_tfidf(&seg, &comm, v);
            let b = score_tfidf(&seg, &comm, |w| values[w] * scale);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
