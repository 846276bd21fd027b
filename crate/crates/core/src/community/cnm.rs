use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::{ensure_nonempty, MIN_GAIN};
use crate::cograph::CoGraph;
use crate::error::Result;
use crate::partition::Partition;

/// Candidate merge in the max-heap. Larger gain first, then the
/// lexicographically smallest community pair.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
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
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

/// Clauset-Newman-Moore greedy modularity agglomeration.
pub fn cnm(graph: &CoGraph) -> Result<Partition> {
    cnm_observed(graph, |_| {})
}

/// [`cnm`], calling `observer` with the community label of every node after
/// each accepted merge.
pub fn cnm_observed<F: FnMut(&[usize])>(graph: &CoGraph, mut observer: F) -> Result<Partition> {
    ensure_nonempty(graph)?;
    let n = graph.node_count();
    let m = graph.total_weight();
    if m <= 0.0 {
        return Ok(Partition::singletons(n));
    }
    let two_m = 2.0 * m;
    let mut share: Vec<f64> = graph.degrees().iter().map(|k| k / two_m).collect();
    let mut links: Vec<HashMap<usize, f64>> = (0..n)
        .map(|v| graph.neighbors(v).iter().copied().collect())
        .collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut version = vec![0u32; n];
    let mut alive = vec![true; n];

    // merging a and b changes Q by 2 (e_ab - a_a a_b) with e_ab = w_ab / 2m
    let gain = |w: f64, sa: f64, sb: f64| w / m - 2.0 * sa * sb;
    let mut heap = BinaryHeap::new();
    for e in graph.edges() {
        heap.push(Candidate {
            gain: gain(e.weight, share[e.a], share[e.b]),
            a: e.a,
            b: e.b,
            version_a: 0,
            version_b: 0,
        });
    }

    while let Some(c) = heap.pop() {
        if !alive[c.a] || !alive[c.b] || version[c.a] != c.version_a || version[c.b] != c.version_b
        {
            continue;
        }
        if c.gain <= MIN_GAIN {
            break;
        }
        let (keep, gone) = (c.a, c.b);
        alive[gone] = false;
        version[keep] += 1;
        share[keep] += share[gone];
        let moved = std::mem::take(&mut links[gone]);
        links[keep].remove(&gone);
        for (other, w) in moved {
            if other == keep {
                continue;
            }
            links[other].remove(&gone);
            *links[other].entry(keep).or_insert(0.0) += w;
            *links[keep].entry(other).or_insert(0.0) += w;
        }
        let gone_members = std::mem::take(&mut members[gone]);
        for &v in &gone_members {
            labels[v] = keep;
        }
        members[keep].extend(gone_members);
        observer(&labels);

        for (&other, &w) in &links[keep] {
            let (a, b) = if keep < other { (keep, other) } else { (other, keep) };
            heap.push(Candidate {
                gain: gain(w, share[keep], share[other]),
                a,
                b,
                version_a: version[a],
                version_b: version[b],
            });
        }
    }
    Ok(Partition::from_labels(labels))
}
