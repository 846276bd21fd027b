use super::{check_k, Metric, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::partition::{Dendrogram, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linkage {
    Ward,
    Complete,
    Average,
}

impl Linkage {
    pub fn name(self) -> &'static str {
        match self {
            Linkage::Ward => "ward",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        }
    }
}

impl std::fmt::Display for Linkage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full agglomeration down to one cluster, via Lance-Williams updates.
///
/// Clusters are identified by their smallest member; among equal distances
/// the pair with the smallest (first, second) identifiers merges first.
/// Ward works on squared Euclidean distances and reports heights on the
/// distance scale, so it needs a Euclidean matrix.
pub fn agglomerative_dendrogram(sim: &SimilarityMatrix, linkage: Linkage) -> Result<Dendrogram> {
    if linkage == Linkage::Ward && sim.metric() != Metric::Euclidean {
        return Err(Error::InvalidParameter(format!(
            "ward linkage needs the euclidean metric, got {}",
            sim.metric().name()
        )));
    }
    let n = sim.len();
    let mut d = sim.distances();
    if linkage == Linkage::Ward {
        d.mapv_inplace(|x| x * x);
    }
    let mut size = vec![1usize; n];
    // dendrogram id of the cluster represented by each smallest member
    let mut node: Vec<usize> = (0..n).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut tree = Dendrogram::new(n);

    while active.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                if d[[i, j]] < best.0 {
                    best = (d[[i, j]], i, j);
                }
            }
        }
        let (dij, i, j) = best;
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for &k in &active {
            if k == i || k == j {
                continue;
            }
            let nk = size[k] as f64;
            let v = match linkage {
                Linkage::Complete => d[[i, k]].max(d[[j, k]]),
                Linkage::Average => (ni * d[[i, k]] + nj * d[[j, k]]) / (ni + nj),
                Linkage::Ward => {
                    ((ni + nk) * d[[i, k]] + (nj + nk) * d[[j, k]] - nk * dij) / (ni + nj + nk)
                }
            };
            d[[i, k]] = v;
            d[[k, i]] = v;
        }
        let height = if linkage == Linkage::Ward { dij.max(0.0).sqrt() } else { dij };
        node[i] = tree.push(node[i], node[j], height);
        size[i] += size[j];
        active.retain(|&x| x != j);
    }
    Ok(tree)
}

/// Agglomerative clustering stopped at `k` clusters.
pub fn agglomerative(sim: &SimilarityMatrix, linkage: Linkage, k: usize) -> Result<Partition> {
    check_k(k, sim.len())?;
    let tree = agglomerative_dendrogram(sim, linkage)?;
    Ok(tree.cut(sim.len() - k))
}
