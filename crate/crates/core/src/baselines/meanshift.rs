use ndarray::{Array1, Array2};

use super::squared_distance;
use crate::error::{Error, Result};
use crate::partition::Partition;

const MAX_ITERATIONS: usize = 300;
const SHIFT_TOLERANCE: f64 = 1e-4;

/// Gaussian-kernel mean shift. Every point climbs to a mode; modes closer
/// than half the bandwidth share a cluster, numbered in point order.
pub fn meanshift(points: &Array2<f64>, bandwidth: f64) -> Result<Partition> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let n = points.nrows();
    let two_h2 = 2.0 * bandwidth * bandwidth;
    let mut modes: Vec<Array1<f64>> = Vec::new();
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = points.row(i).to_owned();
        for _ in 0..MAX_ITERATIONS {
            let mut num = Array1::<f64>::zeros(points.ncols());
            let mut den = 0.0;
            for p in points.rows() {
                let w = (-squared_distance(x.view(), p) / two_h2).exp();
                num.scaled_add(w, &p);
                den += w;
            }
            // every kernel weight underflowed
            if den <= 0.0 {
                break;
            }
            let next = num / den;
            let shift = squared_distance(next.view(), x.view()).sqrt();
            x = next;
            if shift < SHIFT_TOLERANCE {
                break;
            }
        }
        let merge = bandwidth / 2.0;
        let found = modes
            .iter()
            .position(|m| squared_distance(m.view(), x.view()).sqrt() < merge);
        labels.push(found.unwrap_or_else(|| {
            modes.push(x);
            modes.len() - 1
        }));
    }
    Ok(Partition::from_labels(labels))
}
