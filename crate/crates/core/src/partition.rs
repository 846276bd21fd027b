use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// A hard clustering of `len()` elements into `k()` clusters.
///
/// Elements are addressed by position (graph node index or corpus segment
/// index). Cluster indices are always dense: every index in `0..k` has at
/// least one member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, compacting them to `0..k`
    /// while preserving their relative numeric order.
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        let raw: Vec<usize> = labels.into_iter().collect();
        let mut rank = BTreeMap::new();
        for &l in &raw {
            rank.insert(l, 0usize);
        }
        for (i, v) in rank.values_mut().enumerate() {
            *v = i;
        }
        let k = rank.len();
        let labels = raw.iter().map(|l| rank[l]).collect();
        Self { labels, k }
    }

    /// Every element in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            k: n,
        }
    }

    /// All `n` elements in one cluster (`k == 0` when `n == 0`).
    pub fn single_cluster(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cluster_of(&self, element: usize) -> usize {
        self.labels[element]
    }

    /// Members of every cluster, in ascending element order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.labels.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &c in &self.labels {
            out[c] += 1;
        }
        out
    }

    /// Same partition with clusters renumbered by first appearance.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        Self { labels, k: self.k }
    }

    /// True when both partitions group the elements identically.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::PartitionMismatch {
                expected,
                found: self.len(),
            })
        }
    }

    /// JSON object mapping each element name to its cluster index.
    pub fn to_json<S: AsRef<str>>(&self, names: &[S]) -> Result<serde_json::Value> {
        self.check_len(names.len())?;
        let map: serde_json::Map<String, serde_json::Value> = names
            .iter()
            .zip(&self.labels)
            .map(|(n, &c)| (n.as_ref().to_string(), serde_json::Value::from(c)))
            .collect();
        Ok(serde_json::Value::Object(map))
    }
}

/// One agglomeration step. Leaves are numbered `0..leaf_count`; the cluster
/// created by merge `i` gets id `leaf_count + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub new_cluster: usize,
    pub height: f64,
}

/// Merge history of a bottom-up clustering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    leaf_count: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn new(leaf_count: usize) -> Self {
        Self {
            leaf_count,
            merges: Vec::new(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Records a merge and returns the id of the new cluster.
    pub fn push(&mut self, cluster_a: usize, cluster_b: usize, height: f64) -> usize {
        let new_cluster = self.leaf_count + self.merges.len();
        self.merges.push(Merge {
            cluster_a,
            cluster_b,
            new_cluster,
            height,
        });
        new_cluster
    }

    pub fn is_complete(&self) -> bool {
        self.leaf_count == 0 || self.merges.len() + 1 == self.leaf_count
    }

    /// Partition of the leaves after applying the first `steps` merges.
    pub fn cut(&self, steps: usize) -> Partition {
        let steps = steps.min(self.merges.len());
        let total = self.leaf_count + steps;
        let mut parent: Vec<usize> = (0..total).collect();
        for m in &self.merges[..steps] {
            parent[m.cluster_a] = m.new_cluster;
            parent[m.cluster_b] = m.new_cluster;
        }
        let root = |mut x: usize| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        };
        Partition::from_labels((0..self.leaf_count).map(root)).canonical()
    }
}
