use ndarray::{Array2, ArrayView1};
use rand::Rng;

use super::{check_k, squared_distance};
use crate::error::Result;
use crate::partition::Partition;

const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeansOutcome {
    pub partition: Partition,
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squares after every Lloyd iteration.
    pub objective_history: Vec<f64>,
}

impl KMeansOutcome {
    pub fn objective(&self) -> f64 {
        self.objective_history.last().copied().unwrap_or(0.0)
    }
}

fn nearest(p: ArrayView1<f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centroids.rows().into_iter().enumerate() {
        let d = squared_distance(p, row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init<R: Rng>(points: &Array2<f64>, k: usize, rng: &mut R) -> Array2<f64> {
    let n = points.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = (0..n)
        .map(|i| squared_distance(points.row(i), points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            // every point coincides with a center already
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(squared_distance(points.row(i), points.row(next)));
        }
    }
    let mut centroids = Array2::zeros((k, points.ncols()));
    for (c, &i) in chosen.iter().enumerate() {
        centroids.row_mut(c).assign(&points.row(i));
    }
    centroids
}

/// Lloyd's k-means with k-means++ seeding.
///
/// An empty cluster is re-seeded with the point farthest from its centroid
/// (among clusters with more than one point); when every point sits on its
/// centroid the cluster stays empty and the result has fewer than `k`
/// clusters.
pub fn kmeans(points: &Array2<f64>, k: usize, seed: u64) -> Result<KMeansOutcome> {
    let n = points.nrows();
    check_k(k, n)?;
    let mut rng = crate::seeded_rng(seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut assignment = vec![usize::MAX; n];
    let mut history = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        let mut next: Vec<usize> = (0..n).map(|i| nearest(points.row(i), &centroids).0).collect();
        let mut sizes = vec![0usize; k];
        for &c in &next {
            sizes[c] += 1;
        }
        for empty in 0..k {
            if sizes[empty] != 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| sizes[next[i]] > 1)
                .map(|i| (i, squared_distance(points.row(i), centroids.row(next[i]))))
                .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                    Some((_, bd)) if bd >= d => best,
                    _ => Some((i, d)),
                });
            if let Some((i, d)) = far {
                if d > 0.0 {
                    sizes[next[i]] -= 1;
                    next[i] = empty;
                    sizes[empty] = 1;
                }
            }
        }
        let converged = next == assignment;
        assignment = next;

        let mut sums = Array2::<f64>::zeros((k, points.ncols()));
        for (i, &c) in assignment.iter().enumerate() {
            let mut row = sums.row_mut(c);
            row += &points.row(i);
        }
        for c in 0..k {
            if sizes[c] > 0 {
                let mean = sums.row(c).mapv(|x| x / sizes[c] as f64);
                centroids.row_mut(c).assign(&mean);
            }
        }
        let objective = (0..n)
            .map(|i| squared_distance(points.row(i), centroids.row(assignment[i])))
            .sum();
        history.push(objective);
        if converged {
            break;
        }
    }
    Ok(KMeansOutcome {
        partition: Partition::from_labels(assignment),
        centroids,
        objective_history: history,
    })
}
