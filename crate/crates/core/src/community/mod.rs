//! Community detection on [`CoGraph`]s.
//!
//! All algorithms are deterministic for a fixed seed. Ties (label weight,
//! modularity gain, merge pair) go to the smallest id.

mod cnm;
mod label_propagation;
mod louvain;
mod walktrap;

use std::str::FromStr;

pub use cnm::{cnm, cnm_observed};
pub use label_propagation::label_propagation;
pub use louvain::{louvain, louvain_observed};
pub use walktrap::{transition_matrix, walk_distances, walktrap, walktrap_dendrogram, WalktrapOutcome};

pub use crate::partition::{Dendrogram, Partition};

use crate::cograph::CoGraph;
use crate::error::{Error, Result};

/// Smallest modularity gain accepted as an improvement by CNM and Louvain.
pub const MIN_GAIN: f64 = 1e-12;

/// Newman-Girvan modularity of `partition` on the weighted graph.
///
/// Returns 0 for a graph without edges.
pub fn modularity(graph: &CoGraph, partition: &Partition) -> Result<f64> {
    partition.check_len(graph.node_count())?;
    let m = graph.total_weight();
    if m <= 0.0 {
        return Ok(0.0);
    }
    let mut internal = vec![0.0; partition.k()];
    let mut total = vec![0.0; partition.k()];
    for (v, &c) in partition.labels().iter().enumerate() {
        total[c] += graph.degree(v);
    }
    for e in graph.edges() {
        let c = partition.cluster_of(e.a);
        if c == partition.cluster_of(e.b) {
            internal[c] += e.weight;
        }
    }
    Ok(internal
        .iter()
        .zip(&total)
        .map(|(w, k)| w / m - (k / (2.0 * m)).powi(2))
        .sum())
}

/// Graph community detection algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommunityAlgorithm {
    LabelPropagation,
    Cnm,
    Louvain,
    Walktrap,
}

impl CommunityAlgorithm {
    pub const ALL: [CommunityAlgorithm; 4] = [
        CommunityAlgorithm::LabelPropagation,
        CommunityAlgorithm::Cnm,
        CommunityAlgorithm::Louvain,
        CommunityAlgorithm::Walktrap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommunityAlgorithm::LabelPropagation => "lp",
            CommunityAlgorithm::Cnm => "cnm",
            CommunityAlgorithm::Louvain => "louvain",
            CommunityAlgorithm::Walktrap => "walktrap",
        }
    }

    /// Runs the algorithm. `walk_length` is only read by Walktrap and
    /// `seed` only by the randomized algorithms.
    pub fn detect(self, graph: &CoGraph, seed: u64, walk_length: usize) -> Result<Partition> {
        match self {
            CommunityAlgorithm::LabelPropagation => label_propagation(graph, seed),
            CommunityAlgorithm::Cnm => cnm(graph),
            CommunityAlgorithm::Louvain => louvain(graph, seed),
            CommunityAlgorithm::Walktrap => walktrap(graph, walk_length),
        }
    }
}

impl FromStr for CommunityAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lp" | "label-propagation" | "label_propagation" => Ok(Self::LabelPropagation),
            "cnm" => Ok(Self::Cnm),
            "louvain" => Ok(Self::Louvain),
            "walktrap" | "walktraps" => Ok(Self::Walktrap),
            _ => Err(Error::InvalidParameter(format!("unknown community algorithm {s:?}"))),
        }
    }
}

fn ensure_nonempty(graph: &CoGraph) -> Result<()> {
    if graph.is_empty() {
        Err(Error::EmptyGraph)
    } else {
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::test_graphs::*;
    use super::*;
    use proptest::prelude::*;
    use segrel_oracles::{brute_modularity_best, pairwise_modularity, OracleBudget};

    #[test]
    fn disjoint_triangles() {
        let g = two_triangles();
        let p = Partition::from_labels([0, 0, 0, 1, 1, 1]);
        let q = modularity(&g, &p).unwrap();
        let oracle = pairwise_modularity(6, &edges_of(&g), p.labels());
        assert!((q - oracle).abs() < 1e-12);
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bridged_triangles() {
        let mut e = clique_edges(&[0, 1, 2]);
        e.extend(clique_edges(&[3, 4, 5]));
        e.push((2, 3, 1.0));
        let g = CoGraph::with_nodes(6, e).unwrap();
        let p = Partition::from_labels([0, 0, 0, 1, 1, 1]);
        let q = modularity(&g, &p).unwrap();
        assert!((q - 5.0 / 14.0).abs() < 1e-12);
        assert!((q - 0.3571).abs() < 1e-4);
    }

    #[test]
    fn one_community_is_zero() {
        let g = bridged_cliques();
        let q = modularity(&g, &Partition::single_cluster(8)).unwrap();
        assert!(q.abs() < 1e-12);
    }

    #[test]
    fn singletons_formula() {
        let g = bridged_cliques();
        let q = modularity(&g, &Partition::singletons(8)).unwrap();
        let two_m = 2.0 * g.total_weight();
        let expected: f64 = -g.degrees().iter().map(|k| k * k).sum::<f64>() / (two_m * two_m);
        assert!((q - expected).abs() < 1e-12);
        assert!(q < 0.0);
    }

    #[test]
    fn mismatched_partition() {
        let g = two_triangles();
        assert!(matches!(
            modularity(&g, &Partition::singletons(5)),
            Err(Error::PartitionMismatch { expected: 6, found: 5 })
        ));
    }

    #[test]
    fn oracle_agrees_on_two_triangles_optimum() {
        let g = two_triangles();
        let (q, best) = brute_modularity_best(6, &edges_of(&g), OracleBudget::default()).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        assert!(Partition::from_labels(best).same_grouping(&Partition::from_labels([0, 0, 0, 1, 1, 1])));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in CommunityAlgorithm::ALL {
            assert_eq!(a.name().parse::<CommunityAlgorithm>().unwrap(), a);
        }
    }

    pub(crate) fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
        (2usize..=10).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let len = pairs.len();
            (
                Just(n),
                prop::collection::vec((prop::bool::weighted(0.45), 0.5f64..3.0), len).prop_map(
                    move |mask| {
                        pairs
                            .iter()
                            .zip(mask)
                            .filter(|(_, (keep, _))| *keep)
                            .map(|(&(a, b), (_, w))| (a, b, w))
                            .collect::<Vec<_>>()
                    },
                ),
            )
        })
    }

    proptest! {
        #[test]
        fn modularity_matches_pairwise_oracle(
            (n, edges) in random_graph(),
            labels in prop::collection::vec(0usize..4, 10),
        ) {
            prop_assume!(!edges.is_empty());
            let g = CoGraph::with_nodes(n, edges.clone()).unwrap();
            let p = Partition::from_labels(labels[..n].iter().copied());
            let q = modularity(&g, &p).unwrap();
            prop_assert!((q - pairwise_modularity(n, &edges, p.labels())).abs() < 1e-9);
            prop_assert!((-0.5..=1.0).contains(&q));
        }

        #[test]
        fn every_algorithm_returns_dense_total_partition((n, edges) in random_graph(), seed in 0u64..1000) {
            let g = CoGraph::with_nodes(n, edges).unwrap();
            for a in CommunityAlgorithm::ALL {
                let p = a.detect(&g, seed, 3).unwrap();
                prop_assert_eq!(p.len(), n);
                prop_assert!(p.cluster_sizes().iter().all(|&s| s > 0));
            }
        }
    }
}
