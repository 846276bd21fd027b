use rand::seq::SliceRandom;

use super::ensure_nonempty;
use crate::cograph::CoGraph;
use crate::error::Result;
use crate::partition::Partition;

/// Upper bound on full passes; asynchronous propagation with fixed tie
/// breaking can cycle on rare symmetric configurations.
const MAX_PASSES: usize = 1000;

/// Asynchronous label propagation.
///
/// Every node starts with its own label. Each pass visits the nodes in a
/// freshly shuffled order and gives each the neighbor label with the largest
/// summed edge weight (smallest label on ties). Stops after a pass without
/// changes.
pub fn label_propagation(graph: &CoGraph, seed: u64) -> Result<Partition> {
    ensure_nonempty(graph)?;
    let n = graph.node_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut rng = crate::seeded_rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut weight = vec![0.0f64; n];
    let mut touched = Vec::new();

    for _ in 0..MAX_PASSES {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            let nbrs = graph.neighbors(v);
            if nbrs.is_empty() {
                continue;
            }
            for &(u, w) in nbrs {
                let l = labels[u];
                if weight[l] == 0.0 {
                    touched.push(l);
                }
                weight[l] += w;
            }
            let mut best = usize::MAX;
            let mut best_w = f64::NEG_INFINITY;
            for &l in &touched {
                let w = weight[l];
                if w > best_w || (w == best_w && l < best) {
                    best = l;
                    best_w = w;
                }
            }
            for l in touched.drain(..) {
                weight[l] = 0.0;
            }
            if best != labels[v] {
                labels[v] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Partition::from_labels(labels))
}
