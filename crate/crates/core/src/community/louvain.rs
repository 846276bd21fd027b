use rand::seq::SliceRandom;

use super::{ensure_nonempty, MIN_GAIN};
use crate::cograph::CoGraph;
use crate::error::Result;
use crate::partition::Partition;

/// A full local-move + contraction cycle must raise Q by at least this much
/// for another cycle to run.
const CYCLE_TOLERANCE: f64 = 1e-9;
const MAX_PASSES: usize = 1000;

/// Graph at one aggregation level. `self_loop[i]` is the diagonal entry
/// `A_ii` (twice the internal weight of the super-node).
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(graph: &CoGraph) -> Self {
        let n = graph.node_count();
        Self {
            adjacency: (0..n).map(|v| graph.neighbors(v).to_vec()).collect(),
            self_loop: vec![0.0; n],
            degree: graph.degrees().to_vec(),
        }
    }

    fn len(&self) -> usize {
        self.degree.len()
    }

    fn modularity(&self, community: &[usize], two_m: f64) -> f64 {
        let k = community.iter().max().map_or(0, |c| c + 1);
        let mut inside = vec![0.0; k];
        let mut total = vec![0.0; k];
        for v in 0..self.len() {
            let c = community[v];
            total[c] += self.degree[v];
            inside[c] += self.self_loop[v];
            for &(u, w) in &self.adjacency[v] {
                if community[u] == c {
                    inside[c] += w;
                }
            }
        }
        inside
            .iter()
            .zip(&total)
            .map(|(i, t)| i / two_m - (t / two_m).powi(2))
            .sum()
    }

    /// Contracts communities (dense ids `0..k`) into super-nodes.
    fn contract(&self, community: &[usize], k: usize) -> Level {
        let mut self_loop = vec![0.0; k];
        let mut degree = vec![0.0; k];
        let mut links: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for v in 0..self.len() {
            let c = community[v];
            degree[c] += self.degree[v];
            self_loop[c] += self.self_loop[v];
            for &(u, w) in &self.adjacency[v] {
                let d = community[u];
                if d == c {
                    self_loop[c] += w;
                } else {
                    *links[c].entry(d).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adjacency: links.into_iter().map(|l| l.into_iter().collect()).collect(),
            self_loop,
            degree,
        }
    }
}

/// Louvain modularity optimization.
pub fn louvain(graph: &CoGraph, seed: u64) -> Result<Partition> {
    run(graph, seed, None)
}

/// [`louvain`], calling `observer` with the community label of every
/// original node after each accepted move.
pub fn louvain_observed<F: FnMut(&[usize])>(
    graph: &CoGraph,
    seed: u64,
    mut observer: F,
) -> Result<Partition> {
    run(graph, seed, Some(&mut observer))
}

fn run(graph: &CoGraph, seed: u64, mut observer: Option<&mut dyn FnMut(&[usize])>) -> Result<Partition> {
    ensure_nonempty(graph)?;
    let n = graph.node_count();
    let m = graph.total_weight();
    if m <= 0.0 || n == 1 {
        return Ok(if n == 1 {
            Partition::single_cluster(1)
        } else {
            Partition::singletons(n)
        });
    }
    let two_m = 2.0 * m;
    let mut rng = crate::seeded_rng(seed);
    let mut level = Level::from_graph(graph);
    // super-node of every original node at the current level
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut q = level.modularity(&(0..n).collect::<Vec<_>>(), two_m);

    loop {
        let size = level.len();
        let mut community: Vec<usize> = (0..size).collect();
        let mut total: Vec<f64> = level.degree.clone();
        let mut order: Vec<usize> = (0..size).collect();
        order.shuffle(&mut rng);

        let mut weight_to = vec![0.0f64; size];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &v in &order {
                let own = community[v];
                let k = level.degree[v];
                for &(u, w) in &level.adjacency[v] {
                    let c = community[u];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                total[own] -= k;
                // proportional to the modularity change of joining c (times m)
                let score = |c: usize, w: f64| w - total[c] * k / two_m;
                let own_score = score(own, weight_to[own]);
                let mut best = own;
                let mut best_score = own_score;
                for &c in &touched {
                    let s = score(c, weight_to[c]);
                    if s > best_score || (s == best_score && c < best) {
                        best = c;
                        best_score = s;
                    }
                }
                for c in touched.drain(..) {
                    weight_to[c] = 0.0;
                }
                if best != own && (best_score - own_score) / m > MIN_GAIN {
                    community[v] = best;
                    total[best] += k;
                    moved = true;
                    if let Some(obs) = observer.as_deref_mut() {
                        let labels: Vec<usize> = node_of.iter().map(|&s| community[s]).collect();
                        obs(&labels);
                    }
                } else {
                    total[own] += k;
                }
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        if !moved_any {
            break;
        }

        let dense = Partition::from_labels(community.iter().copied());
        let new_q = level.modularity(dense.labels(), two_m);
        for s in node_of.iter_mut() {
            *s = dense.cluster_of(*s);
        }
        level = level.contract(dense.labels(), dense.k());
        let gain = new_q - q;
        q = new_q;
        if gain < CYCLE_TOLERANCE || level.len() == 1 {
            break;
        }
    }
    Ok(Partition::from_labels(node_of))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::test_graphs::*;
    use crate::community::{cnm, modularity};
    use segrel_oracles::pairwise_modularity;

    #[test]
    fn disjoint_cliques_seed_invariant() {
        let g = two_triangles();
        let truth = Partition::from_labels([0, 0, 0, 1, 1, 1]);
        for seed in 0..10 {
            let p = louvain(&g, seed).unwrap();
            assert!(p.same_grouping(&truth));
            let q = modularity(&g, &p).unwrap();
            assert!((q - modularity(&g, &cnm(&g).unwrap()).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn star_never_below_singletons() {
        let g = CoGraph::with_nodes(5, (1..5).map(|i| (0, i, 1.0))).unwrap();
        let p = louvain(&g, 1).unwrap();
        let q = modularity(&g, &p).unwrap();
        assert!(q >= 0.0 - 1e-12);
        assert!(q >= modularity(&g, &Partition::singletons(5)).unwrap());
    }

    #[test]
    fn single_node_is_one_community() {
        let g = CoGraph::with_nodes(1, []).unwrap();
        assert_eq!(louvain(&g, 0).unwrap().k(), 1);
    }

    #[test]
    fn bridged_cliques_split() {
        let g = bridged_cliques();
        for seed in 0..5 {
            let p = louvain(&g, seed).unwrap();
            assert!(p.same_grouping(&Partition::from_labels([0, 0, 0, 0, 1, 1, 1, 1])));
        }
    }

    #[test]
    fn moves_strictly_increase_modularity() {
        let g = bridged_cliques();
        let edges = edges_of(&g);
        let mut q = pairwise_modularity(8, &edges, &(0..8).collect::<Vec<_>>());
        louvain_observed(&g, 4, |labels| {
            let next = pairwise_modularity(8, &edges, labels);
            assert!(next > q, "{next} <= {q}");
            q = next;
        })
        .unwrap();
    }

    #[test]
    fn deterministic_per_seed() {
        let mut e = clique_edges(&[0, 1, 2, 3, 4]);
        e.extend(clique_edges(&[5, 6, 7, 8]));
        e.extend([(4, 5, 1.0), (0, 8, 0.5), (2, 9, 2.0), (9, 10, 1.0), (10, 11, 1.0), (9, 11, 1.0)]);
        let g = CoGraph::with_nodes(12, e).unwrap();
        assert_eq!(louvain(&g, 17).unwrap(), louvain(&g, 17).unwrap());
    }
}
