use ndarray::{Array1, Array2};

use super::{check_k, kmeans, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::partition::Partition;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending and
/// eigenvectors in the matching columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

/// Cyclic Jacobi rotations; accurate to about machine precision for the
/// small dense matrices used here.
pub fn jacobi_eigen(matrix: &Array2<f64>) -> Result<SymmetricEigen> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::InvalidParameter("eigen-decomposition needs a square matrix".into()));
    }
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (matrix[[i, j]], matrix[[j, i]]);
            if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::InvalidParameter("matrix is not symmetric".into()));
            }
        }
    }
    let mut a = matrix.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]] * a[[i, j]])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (c, &i) in order.iter().enumerate() {
        vectors.column_mut(c).assign(&v.column(i));
    }
    Ok(SymmetricEigen { values, vectors })
}

/// `I - D^{-1/2} S D^{-1/2}` over the off-diagonal affinities. Rows with no
/// affinity to anything else are left as zero rows.
pub fn normalized_laplacian(affinity: &Array2<f64>) -> Array2<f64> {
    let n = affinity.nrows();
    let degree: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| affinity[[i, j]]).sum())
        .collect();
    Array2::from_shape_fn((n, n), |(i, j)| {
        if degree[i] == 0.0 || degree[j] == 0.0 {
            0.0
        } else if i == j {
            1.0
        } else {
            -affinity[[i, j]] / (degree[i] * degree[j]).sqrt()
        }
    })
}

/// Rows of the `k` bottom Laplacian eigenvectors, each scaled to unit length.
pub fn spectral_embedding(affinity: &Array2<f64>, k: usize) -> Result<Array2<f64>> {
    check_k(k, affinity.nrows())?;
    let eig = jacobi_eigen(&normalized_laplacian(affinity))?;
    let mut emb = eig.vectors.slice(ndarray::s![.., ..k]).to_owned();
    for mut row in emb.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|x| x / norm);
        }
    }
    Ok(emb)
}

/// Normalized spectral clustering followed by k-means on the embedding.
///
/// Segments with no affinity to any other segment become singletons and use
/// up part of `k`; the rest are split into the remaining clusters (at least
/// one).
pub fn spectral(sim: &SimilarityMatrix, k: usize, seed: u64) -> Result<Partition> {
    let n = sim.len();
    check_k(k, n)?;
    let mut aff = sim.affinities();
    for i in 0..n {
        aff[[i, i]] = 0.0;
    }
    let connected: Vec<usize> = (0..n).filter(|&i| aff.row(i).iter().any(|&x| x > 0.0)).collect();
    let isolated = n - connected.len();
    let mut labels = vec![0; n];
    let mut next = 0;
    if !connected.is_empty() {
        let m = connected.len();
        let sub = Array2::from_shape_fn((m, m), |(a, b)| aff[[connected[a], connected[b]]]);
        let want = k.saturating_sub(isolated).max(1).min(m);
        let emb = spectral_embedding(&sub, want)?;
        let inner = kmeans(&emb, want, seed)?.partition;
        for (a, &i) in connected.iter().enumerate() {
            labels[i] = inner.cluster_of(a);
        }
        next = inner.k();
    }
    for i in 0..n {
        if !connected.contains(&i) {
            labels[i] = next;
            next += 1;
        }
    }
    Ok(Partition::from_labels(labels))
}
