//! Pons-Latapy random-walk agglomeration.
//!
//! Walk distributions are propagated as deviations from the component's
//! stationary distribution, `P^t_x. - pi`. Distances only depend on row
//! differences, so the result is the same as working with `P^t` directly, but
//! the deviations stay representable for long walks where `P^t` rows become
//! numerically indistinguishable.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use ndarray::Array2;

use super::ensure_nonempty;
use crate::cograph::CoGraph;
use crate::error::{Error, Result};
use crate::partition::{Dendrogram, Partition};

/// Row-stochastic transition matrix `P_xy = A_xy / k_x`. Isolated nodes get
/// `P_xx = 1`.
pub fn transition_matrix(graph: &CoGraph) -> Array2<f64> {
    let n = graph.node_count();
    let mut p = Array2::zeros((n, n));
    for x in 0..n {
        let k = graph.degree(x);
        if k > 0.0 {
            for &(y, w) in graph.neighbors(x) {
                p[[x, y]] = w / k;
            }
        } else {
            p[[x, x]] = 1.0;
        }
    }
    p
}

/// Walk state of one connected component in local indices.
struct Component<'g> {
    nodes: &'g [usize],
    degree: Vec<f64>,
    /// local neighbor lists with transition probabilities
    steps: Vec<Vec<(usize, f64)>>,
    local_links: Vec<Vec<(usize, f64)>>,
}

impl<'g> Component<'g> {
    fn new(graph: &CoGraph, nodes: &'g [usize]) -> Self {
        let local: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let degree: Vec<f64> = nodes.iter().map(|&v| graph.degree(v)).collect();
        let local_links: Vec<Vec<(usize, f64)>> = nodes
            .iter()
            .map(|&v| graph.neighbors(v).iter().map(|&(u, w)| (local[&u], w)).collect())
            .collect();
        let steps = local_links
            .iter()
            .zip(&degree)
            .map(|(l, &k)| l.iter().map(|&(u, w)| (u, w / k)).collect())
            .collect();
        Self {
            nodes,
            degree,
            steps,
            local_links,
        }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn stationary(&self) -> Vec<f64> {
        let vol: f64 = self.degree.iter().sum();
        self.degree.iter().map(|k| k / vol).collect()
    }

    /// `P^t_x. - pi` for every local node `x`.
    fn deviations(&self, t: usize) -> Vec<Vec<f64>> {
        let s = self.len();
        let pi = self.stationary();
        let mut next = vec![0.0; s];
        (0..s)
            .map(|x| {
                let mut d: Vec<f64> = pi.iter().map(|p| -p).collect();
                d[x] += 1.0;
                for _ in 0..t {
                    next.iter_mut().for_each(|v| *v = 0.0);
                    for (y, &dy) in d.iter().enumerate() {
                        if dy != 0.0 {
                            for &(z, p) in &self.steps[y] {
                                next[z] += dy * p;
                            }
                        }
                    }
                    std::mem::swap(&mut d, &mut next);
                }
                d
            })
            .collect()
    }

    fn squared_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.degree)
            .map(|((x, y), k)| (x - y) * (x - y) / k)
            .sum()
    }
}

/// Matrix of walk distances `r_xy = sqrt(sum_z (P^t_xz - P^t_yz)^2 / k_z)`.
pub fn walk_distances(graph: &CoGraph, t: usize) -> Result<Array2<f64>> {
    check_walk_length(t)?;
    let n = graph.node_count();
    // full P^t rows, reconstructed as pi + deviation on the node's component
    let mut rows = vec![vec![0.0; n]; n];
    for comp in graph.components() {
        if comp.len() == 1 {
            rows[comp[0]][comp[0]] = 1.0;
            continue;
        }
        let c = Component::new(graph, &comp);
        let pi = c.stationary();
        for (x, dev) in c.deviations(t).into_iter().enumerate() {
            for (z, d) in dev.into_iter().enumerate() {
                rows[comp[x]][comp[z]] = pi[z] + d;
            }
        }
    }
    let degree: Vec<f64> = graph.degrees().to_vec();
    let mut out = Array2::zeros((n, n));
    for x in 0..n {
        for y in x + 1..n {
            let r2: f64 = (0..n)
                .filter(|&z| degree[z] > 0.0)
                .map(|z| (rows[x][z] - rows[y][z]).powi(2) / degree[z])
                .sum();
            out[[x, y]] = r2.sqrt();
            out[[y, x]] = r2.sqrt();
        }
    }
    Ok(out)
}

fn check_walk_length(t: usize) -> Result<()> {
    if t == 0 {
        Err(Error::InvalidParameter("walk length t must be at least 1".into()))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct WalktrapOutcome {
    /// The dendrogram cut with maximum modularity.
    pub partition: Partition,
    /// Merge history over all components; leaves are the graph nodes and
    /// heights are the Ward increments.
    pub dendrogram: Dendrogram,
    pub modularity: f64,
}

/// Walktrap communities for walks of length `t`.
pub fn walktrap(graph: &CoGraph, t: usize) -> Result<Partition> {
    walktrap_dendrogram(graph, t).map(|o| o.partition)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    delta: f64,
    a: usize,
    b: usize,
    version_a: u32,
    version_b: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // reversed: BinaryHeap pops the smallest delta, then the smallest pair
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .delta
            .total_cmp(&self.delta)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

struct Community {
    size: usize,
    walk: Vec<f64>,
    degree: f64,
    links: BTreeMap<usize, f64>,
    dendrogram_id: usize,
    version: u32,
    alive: bool,
}

/// Walktrap with its full merge history. Each connected component is
/// agglomerated on its own; the cut is chosen per component, which maximizes
/// the modularity of the whole graph because component terms add up.
pub fn walktrap_dendrogram(graph: &CoGraph, t: usize) -> Result<WalktrapOutcome> {
    ensure_nonempty(graph)?;
    check_walk_length(t)?;
    let n = graph.node_count();
    let m = graph.total_weight();
    let mut dendrogram = Dendrogram::new(n);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut total_q = 0.0;
    if m <= 0.0 {
        return Ok(WalktrapOutcome {
            partition: Partition::singletons(n),
            dendrogram,
            modularity: 0.0,
        });
    }
    let two_m = 2.0 * m;

    for nodes in graph.components() {
        let comp = Component::new(graph, &nodes);
        let s = comp.len();
        let mut q: f64 = comp.degree.iter().map(|k| -(k / two_m).powi(2)).sum();
        if s == 1 {
            total_q += q;
            continue;
        }
        let mut communities: Vec<Community> = comp
            .deviations(t)
            .into_iter()
            .enumerate()
            .map(|(x, walk)| Community {
                size: 1,
                walk,
                degree: comp.degree[x],
                links: comp.local_links[x].iter().copied().collect(),
                dendrogram_id: nodes[x],
                version: 0,
                alive: true,
            })
            .collect();

        let ward = |a: &Community, b: &Community| {
            let (na, nb) = (a.size as f64, b.size as f64);
            na * nb / (na + nb) * comp.squared_distance(&a.walk, &b.walk) / s as f64
        };
        let mut heap = BinaryHeap::new();
        for a in 0..s {
            for &b in communities[a].links.keys() {
                if a < b {
                    heap.push(Candidate {
                        delta: ward(&communities[a], &communities[b]),
                        a,
                        b,
                        version_a: 0,
                        version_b: 0,
                    });
                }
            }
        }

        // merges local to this component, as (kept, absorbed) slots
        let mut steps: Vec<(usize, usize)> = Vec::with_capacity(s - 1);
        let mut best_q = q;
        let mut best_step = 0;
        while let Some(c) = heap.pop() {
            let (ca, cb) = (&communities[c.a], &communities[c.b]);
            if !ca.alive || !cb.alive || ca.version != c.version_a || cb.version != c.version_b {
                continue;
            }
            let between = ca.links[&c.b];
            q += between / m - 2.0 * (ca.degree / two_m) * (cb.degree / two_m);
            let id = dendrogram.push(ca.dendrogram_id, cb.dendrogram_id, c.delta);

            let absorbed = std::mem::replace(
                &mut communities[c.b],
                Community {
                    size: 0,
                    walk: Vec::new(),
                    degree: 0.0,
                    links: BTreeMap::new(),
                    dendrogram_id: usize::MAX,
                    version: 0,
                    alive: false,
                },
            );
            let kept = &mut communities[c.a];
            let (na, nb) = (kept.size as f64, absorbed.size as f64);
            for (w, v) in kept.walk.iter_mut().zip(&absorbed.walk) {
                *w = (na * *w + nb * v) / (na + nb);
            }
            kept.size += absorbed.size;
            kept.degree += absorbed.degree;
            kept.dendrogram_id = id;
            kept.version += 1;
            kept.links.remove(&c.b);
            for (&other, &w) in &absorbed.links {
                if other != c.a {
                    *kept.links.entry(other).or_insert(0.0) += w;
                }
            }
            let kept_links: Vec<(usize, f64)> = kept.links.iter().map(|(&k, &w)| (k, w)).collect();
            for &(other, w) in &kept_links {
                let o = &mut communities[other].links;
                o.remove(&c.b);
                o.insert(c.a, w);
            }
            for &(other, _) in &kept_links {
                let (a, b) = if c.a < other { (c.a, other) } else { (other, c.a) };
                heap.push(Candidate {
                    delta: ward(&communities[a], &communities[b]),
                    a,
                    b,
                    version_a: communities[a].version,
                    version_b: communities[b].version,
                });
            }

            steps.push((c.a, c.b));
            if q > best_q {
                best_q = q;
                best_step = steps.len();
            }
        }
        total_q += best_q;

        let mut local: Vec<usize> = (0..s).collect();
        for &(keep, gone) in &steps[..best_step] {
            for l in local.iter_mut() {
                if *l == gone {
                    *l = keep;
                }
            }
        }
        for (x, &l) in local.iter().enumerate() {
            labels[nodes[x]] = nodes[l];
        }
    }

    Ok(WalktrapOutcome {
        partition: Partition::from_labels(labels),
        dendrogram,
        modularity: total_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::modularity;
    use crate::community::test_graphs::*;
    use segrel_oracles::pairwise_modularity;

    #[test]
    fn rows_are_stochastic() {
        let p = transition_matrix(&bridged_cliques());
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_cliques_one_community_each() {
        let g = two_triangles();
        for t in [1, 2, 5, 50] {
            let p = walktrap(&g, t).unwrap();
            assert_eq!(p.k(), 2);
            assert!(p.same_grouping(&Partition::from_labels([0, 0, 0, 1, 1, 1])));
        }
    }

    #[test]
    fn bridged_cliques_short_and_long_walks() {
        let g = bridged_cliques();
        let truth = Partition::from_labels([0, 0, 0, 0, 1, 1, 1, 1]);
        let edges = edges_of(&g);
        for t in [1, 1000] {
            let out = walktrap_dendrogram(&g, t).unwrap();
            assert!(out.partition.same_grouping(&truth), "t = {t}: {:?}", out.partition);
            // exhaustive scan over every cut of the dendrogram
            let best = (0..=out.dendrogram.merges().len())
                .map(|s| pairwise_modularity(8, &edges, out.dendrogram.cut(s).labels()))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((best - out.modularity).abs() < 1e-12);
            assert!((modularity(&g, &out.partition).unwrap() - best).abs() < 1e-12);
        }
    }

    #[test]
    fn distances_are_a_semimetric() {
        let g = bridged_cliques();
        let d = walk_distances(&g, 3).unwrap();
        for x in 0..8 {
            assert_eq!(d[[x, x]], 0.0);
            for y in 0..8 {
                assert!(d[[x, y]] >= 0.0);
                assert_eq!(d[[x, y]], d[[y, x]]);
            }
        }
        // 1 and 2 are interchangeable as seen from 0
        assert!((d[[0, 1]] - d[[0, 2]]).abs() < 1e-12);
        assert!(d[[0, 4]] > d[[0, 1]]);
        assert!(d[[0, 7]] > d[[0, 1]]);
    }

    #[test]
    fn distances_match_matrix_power() {
        let g = bridged_cliques();
        let p = transition_matrix(&g);
        let mut pt = p.clone();
        for _ in 1..4 {
            pt = pt.dot(&p);
        }
        let d = walk_distances(&g, 4).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                let r2: f64 = (0..8)
                    .map(|z| (pt[[x, z]] - pt[[y, z]]).powi(2) / g.degree(z))
                    .sum();
                assert!((r2.sqrt() - d[[x, y]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heights_nondecreasing_on_complete_graph() {
        let g = CoGraph::with_nodes(6, clique_edges(&[0, 1, 2, 3, 4, 5])).unwrap();
        let out = walktrap_dendrogram(&g, 2).unwrap();
        assert!(out.dendrogram.is_complete());
        let h: Vec<f64> = out.dendrogram.merges().iter().map(|m| m.height).collect();
        assert!(h.windows(2).all(|w| w[0] <= w[1] + 1e-15), "{h:?}");
    }

    #[test]
    fn zero_walk_length_rejected() {
        assert!(walktrap(&two_triangles(), 0).is_err());
    }

    #[test]
    fn isolated_node_stays_alone() {
        let g = CoGraph::with_nodes(4, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let p = walktrap(&g, 3).unwrap();
        assert_eq!(p.len(), 4);
        assert_ne!(p.cluster_of(3), p.cluster_of(0));
    }
}
