use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::partition::Partition;

const MAX_ITERATIONS: usize = 200;
const RELATIVE_TOLERANCE: f64 = 1e-6;
// keeps the multiplicative updates away from 0/0
const DENOMINATOR_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct NmfOutcome {
    pub partition: Partition,
    pub w: Array2<f64>,
    pub h: Array2<f64>,
    /// Squared Frobenius reconstruction error, initial value first.
    pub error_history: Vec<f64>,
}

fn reconstruction_error(v: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    (v - &w.dot(h)).iter().map(|x| x * x).sum()
}

/// Factorizes `v ≈ w h` with Lee-Seung multiplicative updates and puts each
/// row in the cluster of its largest `w` coefficient (smallest index on ties).
pub fn nmf(v: &Array2<f64>, k: usize, seed: u64) -> Result<NmfOutcome> {
    let (rows, cols) = v.dim();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::InvalidParameter(format!(
            "nmf rank {k} must be in 1..={}",
            rows.min(cols)
        )));
    }
    if v.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("nmf input must be nonnegative".into()));
    }
    let mut rng = crate::seeded_rng(seed);
    let mean = v.mean().unwrap_or(0.0);
    let scale = if mean > 0.0 { (mean / k as f64).sqrt() } else { 1.0 };
    let mut w = Array2::from_shape_fn((rows, k), |_| scale * rng.random_range(0.01..1.0));
    let mut h = Array2::from_shape_fn((k, cols), |_| scale * rng.random_range(0.01..1.0));

    let mut history = vec![reconstruction_error(v, &w, &h)];
    for _ in 0..MAX_ITERATIONS {
        let num = w.t().dot(v);
        let den = w.t().dot(&w).dot(&h);
        h.zip_mut_with(&(num / (den + DENOMINATOR_EPS)), |x, r| *x *= r);
        let num = v.dot(&h.t());
        let den = w.dot(&h.dot(&h.t()));
        w.zip_mut_with(&(num / (den + DENOMINATOR_EPS)), |x, r| *x *= r);

        let err = reconstruction_error(v, &w, &h);
        let prev = *history.last().unwrap();
        history.push(err);
        if prev <= 0.0 || (prev - err) / prev < RELATIVE_TOLERANCE {
            break;
        }
    }
    let labels: Vec<usize> = w
        .rows()
        .into_iter()
        .map(|r| {
            let mut best = 0;
            for (c, &x) in r.iter().enumerate() {
                if x > r[best] {
                    best = c;
                }
            }
            best
        })
        .collect();
    Ok(NmfOutcome {
        partition: Partition::from_labels(labels),
        w,
        h,
        error_history: history,
    })
}
