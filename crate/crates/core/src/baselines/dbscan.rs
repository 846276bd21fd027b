use std::collections::VecDeque;

use super::SimilarityMatrix;
use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq)]
pub struct DbscanOutcome {
    /// Density clusters first, then one singleton per noise point.
    pub partition: Partition,
    pub core: Vec<bool>,
    pub noise: Vec<bool>,
    /// Number of density clusters (excluding noise singletons).
    pub clusters: usize,
}

/// DBSCAN over the matrix's distances. A neighborhood is every point within
/// `eps`, the point itself included. Border points join the cluster of their
/// nearest core neighbor.
pub fn dbscan(sim: &SimilarityMatrix, eps: f64, min_pts: usize) -> Result<DbscanOutcome> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be finite and >= 0, got {eps}")));
    }
    if min_pts == 0 {
        return Err(Error::InvalidParameter("min_pts must be at least 1".into()));
    }
    let d = sim.distances();
    let n = sim.len();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| d[[i, j]] <= eps).collect())
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut clusters = 0;
    for start in 0..n {
        if !core[start] || label[start].is_some() {
            continue;
        }
        label[start] = Some(clusters);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for &q in &neighbors[p] {
                if core[q] && label[q].is_none() {
                    label[q] = Some(clusters);
                    queue.push_back(q);
                }
            }
        }
        clusters += 1;
    }
    for i in 0..n {
        if core[i] {
            continue;
        }
        let nearest = neighbors[i]
            .iter()
            .filter(|&&j| core[j])
            .min_by(|&&a, &&b| d[[i, a]].total_cmp(&d[[i, b]]).then(a.cmp(&b)));
        label[i] = nearest.and_then(|&j| label[j]);
    }
    let noise: Vec<bool> = label.iter().map(Option::is_none).collect();
    let mut next = clusters;
    let labels = label.into_iter().map(|l| {
        l.unwrap_or_else(|| {
            next += 1;
            next - 1
        })
    });
    Ok(DbscanOutcome {
        partition: Partition::from_labels(labels.collect::<Vec<_>>()),
        core,
        noise,
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::test_data::two_blobs;
    use crate::baselines::{similarity, Metric, SegmentMatrix};
    use crate::eval::accuracy;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use segrel_oracles::brute_dbscan_cores;

    fn euclid(points: Array2<f64>) -> SimilarityMatrix {
        similarity(&SegmentMatrix::new(points).unwrap(), Metric::Euclidean).unwrap()
    }

    #[test]
    fn chain_with_border_and_noise() {
        let s = euclid(array![[0.0], [1.0], [2.0], [3.5], [10.0]]);
        let out = dbscan(&s, 1.0, 3).unwrap();
        assert_eq!(out.core, vec![false, true, false, false, false]);
        assert_eq!(out.clusters, 1);
        assert_eq!(out.noise, vec![false, false, false, true, true]);
        assert_eq!(out.partition.labels(), &[0, 0, 0, 1, 2]);
    }

    #[test]
    fn min_pts_one_makes_every_point_core() {
        let s = euclid(array![[0.0], [5.0], [10.0]]);
        let out = dbscan(&s, 0.5, 1).unwrap();
        assert_eq!(out.clusters, 3);
        assert!(out.noise.iter().all(|&x| !x));
    }

    #[test]
    fn bad_parameters() {
        let s = euclid(array![[0.0]]);
        assert!(dbscan(&s, -1.0, 2).is_err());
        assert!(dbscan(&s, 1.0, 0).is_err());
    }

    #[test]
    fn blobs_recovered() {
        let (pts, labels) = two_blobs(20, 5);
        let out = dbscan(&euclid(pts), 1.5, 3).unwrap();
        assert_eq!(out.clusters, 2);
        assert_eq!(accuracy(&out.partition, &Partition::from_labels(labels)).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn cores_and_noise_match_closure(
            xs in prop::collection::vec(0.0f64..10.0, 1..12),
            eps in 0.1f64..3.0,
            min_pts in 1usize..4,
        ) {
            let n = xs.len();
            let s = euclid(Array2::from_shape_fn((n, 1), |(i, _)| xs[i]));
            let dist: Vec<Vec<f64>> = s.values().rows().into_iter().map(|r| r.to_vec()).collect();
            let (comp, noise) = brute_dbscan_cores(&dist, eps, min_pts);
            let out = dbscan(&s, eps, min_pts).unwrap();
            prop_assert_eq!(&out.noise, &noise);
            for i in 0..n {
                prop_assert_eq!(out.core[i], comp[i].is_some());
                for j in 0..n {
                    if let (Some(a), Some(b)) = (comp[i], comp[j]) {
                        prop_assert_eq!(a == b, out.partition.cluster_of(i) == out.partition.cluster_of(j));
                    }
                }
            }
        }
    }
}
