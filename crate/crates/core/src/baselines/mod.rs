//! Vector-space clustering baselines over segment tf-idf vectors.

mod agglomerative;
mod dbscan;
mod kmeans;
mod meanshift;
mod nmf;
mod spectral;

use std::str::FromStr;

use ndarray::{Array2, ArrayView1};

pub use agglomerative::{agglomerative, agglomerative_dendrogram, Linkage};
pub use dbscan::{dbscan, DbscanOutcome};
pub use kmeans::{kmeans, KMeansOutcome};
pub use meanshift::meanshift;
pub use nmf::{nmf, NmfOutcome};
pub use spectral::{jacobi_eigen, normalized_laplacian, spectral, spectral_embedding, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tfidf::{FilteredSegments, TfidfTable};

/// Which per-word weight fills the segment vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VectorKind {
    #[default]
    Tfidf,
    Counts,
}

/// One row per segment (corpus order), one column per vocabulary word.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMatrix {
    data: Array2<f64>,
}

impl SegmentMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter(
                "segment matrix entries must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { data })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }
}

pub fn vectorize(table: &TfidfTable, kind: VectorKind) -> SegmentMatrix {
    let mut data = Array2::zeros((table.segment_count(), table.vocabulary().len()));
    for s in 0..table.segment_count() {
        for e in table.entries(s) {
            data[[s, e.word]] = match kind {
                VectorKind::Tfidf => e.value,
                VectorKind::Counts => f64::from(e.count),
            };
        }
    }
    SegmentMatrix { data }
}

/// Like [`vectorize`], restricted to each segment's top-n words.
pub fn vectorize_filtered(table: &TfidfTable, filtered: &FilteredSegments, kind: VectorKind) -> SegmentMatrix {
    let mut m = vectorize(table, kind);
    for s in 0..m.rows() {
        let kept = filtered.kept(s);
        for w in 0..m.cols() {
            if !kept.contains(&w) {
                m.data[[s, w]] = 0.0;
            }
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Cosine,
    Euclidean,
    Gaussian { sigma2: f64 },
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Cosine => "cosine",
            Metric::Euclidean => "euclidean",
            Metric::Gaussian { .. } => "gaussian",
        }
    }

    pub fn sigma2(&self) -> Option<f64> {
        match self {
            Metric::Gaussian { sigma2 } => Some(*sigma2),
            _ => None,
        }
    }

    /// Builds a metric from its name; `sigma2` is required for gaussian.
    pub fn from_name(name: &str, sigma2: Option<f64>) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "cosine" => Ok(Metric::Cosine),
            "euclidean" => Ok(Metric::Euclidean),
            "gaussian" | "rbf" => match sigma2 {
                Some(s) if s > 0.0 => Ok(Metric::Gaussian { sigma2: s }),
                Some(s) => Err(Error::InvalidParameter(format!("sigma2 must be positive, got {s}"))),
                None => Err(Error::InvalidParameter("gaussian metric needs sigma2".into())),
            },
            _ => Err(Error::InvalidParameter(format!("unknown metric {name:?}"))),
        }
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ward" => Ok(Linkage::Ward),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            _ => Err(Error::InvalidParameter(format!("unknown linkage {s:?}"))),
        }
    }
}

/// Pairwise segment similarities (Euclidean holds distances instead).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    values: Array2<f64>,
    metric: Metric,
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn similarity(m: &SegmentMatrix, metric: Metric) -> Result<SimilarityMatrix> {
    if let Metric::Gaussian { sigma2 } = metric {
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {sigma2}")));
        }
    }
    let n = m.rows();
    let x = m.data();
    let norms: Vec<f64> = x.rows().into_iter().map(|r| r.dot(&r).sqrt()).collect();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = match metric {
                Metric::Cosine if i == j => 1.0,
                // a zero row is similar to nothing but itself
                Metric::Cosine if norms[i] == 0.0 || norms[j] == 0.0 => 0.0,
                Metric::Cosine => (x.row(i).dot(&x.row(j)) / (norms[i] * norms[j])).clamp(0.0, 1.0),
                Metric::Euclidean => squared_distance(x.row(i), x.row(j)).sqrt(),
                Metric::Gaussian { sigma2 } => {
                    (-squared_distance(x.row(i), x.row(j)) / (2.0 * sigma2)).exp()
                }
            };
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(SimilarityMatrix { values, metric })
}

impl SimilarityMatrix {
    /// Wraps a precomputed symmetric matrix.
    pub fn from_values(values: Array2<f64>, metric: Metric) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::InvalidParameter("similarity matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[[i, j]];
                if !(v >= 0.0 && v.is_finite()) || v != values[[j, i]] {
                    return Err(Error::InvalidParameter(
                        "similarity matrix must be symmetric, finite and nonnegative".into(),
                    ));
                }
            }
        }
        Ok(Self { values, metric })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dissimilarities: Euclidean distances as stored, `1 - s` for the
    /// bounded metrics.
    pub fn distances(&self) -> Array2<f64> {
        match self.metric {
            Metric::Euclidean => self.values.clone(),
            _ => self.values.mapv(|s| (1.0 - s).max(0.0)),
        }
    }

    /// Affinities for graph-based clustering: similarities as stored,
    /// `1 / (1 + d)` for Euclidean distances.
    pub fn affinities(&self) -> Array2<f64> {
        match self.metric {
            Metric::Euclidean => self.values.mapv(|d| 1.0 / (1.0 + d)),
            _ => self.values.clone(),
        }
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::InvalidParameter(format!("k = {k} must be in 1..={n}")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod test_data {
    use ndarray::Array2;
    use rand::Rng;

    /// Two nonnegative 2-D blobs of `per` points each, around (8, 1) and
    /// (1, 8). Returns points and planted labels.
    pub fn two_blobs(per: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = crate::seeded_rng(seed);
        let mut data = Array2::zeros((2 * per, 2));
        let mut labels = Vec::new();
        for i in 0..2 * per {
            let (cx, cy) = if i < per { (8.0, 1.0) } else { (1.0, 8.0) };
            data[[i, 0]] = cx + rng.random_range(-0.5..0.5);
            data[[i, 1]] = cy + rng.random_range(-0.5..0.5);
            labels.push(usize::from(i >= per));
        }
        (data, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Document, Segment};
    use crate::tfidf::compute_tfidf;
    use ndarray::array;

    fn table(texts: &[&str]) -> TfidfTable {
        let segs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Segment::new(format!("s{i}"), "d", *t, None))
            .collect();
        compute_tfidf(&Corpus::new(vec![Document { id: "d".into(), media: "t".into() }], segs).unwrap())
            .unwrap()
    }

    #[test]
    fn vectorize_examples() {
        let t = table(&["w b", "c d", ""]);
        let m = vectorize(&t, VectorKind::Tfidf);
        assert_eq!(m.rows(), 3);
        assert_eq!(m.data().row(0).dot(&m.data().row(1)), 0.0);
        assert!(m.data().row(2).iter().all(|&x| x == 0.0));
        assert_eq!(m, vectorize(&t, VectorKind::Tfidf));
        let f = crate::tfidf::top_n_filter(&t, 1).unwrap();
        let kept = vectorize_filtered(&t, &f, VectorKind::Tfidf);
        assert_eq!(kept.data().iter().filter(|&&x| x > 0.0).count(), 2);
        let counts = vectorize(&table(&["w w b", "c"]), VectorKind::Counts);
        assert_eq!(counts.data()[[0, 2]], 2.0);
    }

    #[test]
    fn similarity_examples() {
        let m = SegmentMatrix::new(array![[1.0, 2.0], [1.0, 2.0], [0.0, 0.0], [2.0, 0.0], [0.0, 3.0]])
            .unwrap();
        let cos = similarity(&m, Metric::Cosine).unwrap();
        assert!((cos.values()[[0, 1]] - 1.0).abs() < 1e-12);
        assert_eq!(cos.values()[[3, 4]], 0.0);
        assert_eq!(cos.values()[[2, 0]], 0.0);
        assert_eq!(cos.values()[[2, 2]], 1.0);
        let euc = similarity(&m, Metric::Euclidean).unwrap();
        assert_eq!(euc.values()[[0, 1]], 0.0);
        assert!((euc.values()[[3, 4]] - 13f64.sqrt()).abs() < 1e-12);
        let g = similarity(&m, Metric::Gaussian { sigma2: 6.5 }).unwrap();
        assert_eq!(g.values()[[0, 1]], 1.0);
        // d^2 = 13 = 2 sigma^2
        assert!((g.values()[[3, 4]] - (-1f64).exp()).abs() < 1e-12);
        assert!((g.values()[[3, 4]] - 0.3679).abs() < 1e-4);
        assert!(similarity(&m, Metric::Gaussian { sigma2: 0.0 }).is_err());
    }

    #[test]
    fn metric_parsing() {
        assert_eq!(Metric::from_name("cosine", None).unwrap(), Metric::Cosine);
        assert!(Metric::from_name("gaussian", None).is_err());
        assert_eq!(
            Metric::from_name("gaussian", Some(2.0)).unwrap(),
            Metric::Gaussian { sigma2: 2.0 }
        );
        assert!("single".parse::<Linkage>().is_err());
    }
}
