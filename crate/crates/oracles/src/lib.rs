//! Brute-force reference implementations for the segrel test suites.
//!
//! Nothing here depends on `segrel-core`: every oracle is derived from the
//! textbook definition and works on plain label vectors, edge lists and
//! distance matrices. Inputs are capped by an [`OracleBudget`]; exceeding it
//! is an error, never a silent truncation.

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle budget exceeded: {what} = {value} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_nodes: usize,
    pub max_items: usize,
    pub max_clusters: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_nodes: 12,
            max_items: 10,
            max_clusters: 6,
        }
    }
}

fn check(what: &'static str, value: usize, limit: usize) -> Result<(), OracleError> {
    if value > limit {
        Err(OracleError::BudgetExceeded { what, value, limit })
    } else {
        Ok(())
    }
}

fn dense_adjacency(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    a
}

/// `B_ij = A_ij - k_i k_j / 2m`.
fn modularity_matrix(n: usize, edges: &[(usize, usize, f64)]) -> (Vec<Vec<f64>>, f64) {
    let a = dense_adjacency(n, edges);
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let b = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] - k[i] * k[j] / two_m).collect())
        .collect();
    (b, two_m)
}

/// `Q = 1/2m * sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j]`, summed over every
/// ordered node pair.
pub fn pairwise_modularity(n: usize, edges: &[(usize, usize, f64)], labels: &[usize]) -> f64 {
    let (b, two_m) = modularity_matrix(n, edges);
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += b[i][j];
            }
        }
    }
    q / two_m
}

/// Exact modularity maximum over all set partitions of the nodes.
///
/// Returns the best value and a partition attaining it (labels in
/// restricted-growth form).
pub fn brute_modularity_best(
    n: usize,
    edges: &[(usize, usize, f64)],
    budget: OracleBudget,
) -> Result<(f64, Vec<usize>), OracleError> {
    check("nodes", n, budget.max_nodes)?;
    let (b, two_m) = modularity_matrix(n, edges);
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let mut labels = vec![0usize; n];
    let mut best = (f64::NEG_INFINITY, labels.clone());
    // depth-first over restricted growth strings; `acc` is sum_ij B_ij over
    // same-label pairs among the nodes assigned so far
    fn walk(
        i: usize,
        blocks: usize,
        acc: f64,
        labels: &mut Vec<usize>,
        b: &[Vec<f64>],
        best: &mut (f64, Vec<usize>),
    ) {
        let n = labels.len();
        if i == n {
            if acc > best.0 {
                *best = (acc, labels.clone());
            }
            return;
        }
        for c in 0..=blocks {
            labels[i] = c;
            let mut add = b[i][i];
            for j in 0..i {
                if labels[j] == c {
                    add += 2.0 * b[i][j];
                }
            }
            walk(i + 1, blocks.max(c + 1), acc + add, labels, b, best);
        }
    }
    labels[0] = 0;
    walk(1, 1, b[0][0], &mut labels, &b, &mut best);
    let q = if two_m == 0.0 { 0.0 } else { best.0 / two_m };
    Ok((q, best.1))
}

/// Pair-counting summary of two labelings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub ari: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// ARI, pairwise precision, recall and F1 by enumerating all item pairs.
///
/// ARI uses the pair-count form `2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d))` in
/// exact rational arithmetic; a zero denominator yields 1. Empty precision or
/// recall denominators yield 1, and F1 is 0 when both are 0.
pub fn brute_pair_metrics(
    pred: &[usize],
    truth: &[usize],
    budget: OracleBudget,
) -> Result<PairMetrics, OracleError> {
    if pred.len() != truth.len() {
        return Err(OracleError::LengthMismatch(pred.len(), truth.len()));
    }
    check("items", pred.len(), budget.max_items)?;
    let (mut a, mut b, mut c, mut d) = (0i128, 0i128, 0i128, 0i128);
    for i in 0..pred.len() {
        for j in i + 1..pred.len() {
            match (pred[i] == pred[j], truth[i] == truth[j]) {
                (true, true) => a += 1,
                (true, false) => b += 1,
                (false, true) => c += 1,
                (false, false) => d += 1,
            }
        }
    }
    let to_f = |r: Ratio<i128>| *r.numer() as f64 / *r.denom() as f64;
    let den = (a + b) * (b + d) + (a + c) * (c + d);
    let ari = if den == 0 {
        1.0
    } else {
        to_f(Ratio::new(2 * (a * d - b * c), den))
    };
    let precision = if a + b == 0 {
        Ratio::from_integer(1)
    } else {
        Ratio::new(a, a + b)
    };
    let recall = if a + c == 0 {
        Ratio::from_integer(1)
    } else {
        Ratio::new(a, a + c)
    };
    let f1 = if precision + recall == Ratio::from_integer(0) {
        Ratio::from_integer(0)
    } else {
        Ratio::from_integer(2) * precision * recall / (precision + recall)
    };
    Ok(PairMetrics {
        ari,
        precision: to_f(precision),
        recall: to_f(recall),
        f1: to_f(f1),
    })
}

fn distinct(labels: &[usize]) -> Vec<usize> {
    let mut v = labels.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Largest number of matched items over every injective map from predicted
/// clusters to true clusters (unmapped predicted clusters allowed).
pub fn brute_best_matching(
    pred: &[usize],
    truth: &[usize],
    budget: OracleBudget,
) -> Result<usize, OracleError> {
    if pred.len() != truth.len() {
        return Err(OracleError::LengthMismatch(pred.len(), truth.len()));
    }
    let p = distinct(pred);
    let t = distinct(truth);
    check("predicted clusters", p.len(), budget.max_clusters)?;
    check("true clusters", t.len(), budget.max_clusters)?;
    let mut table = vec![vec![0usize; t.len()]; p.len()];
    for (x, y) in pred.iter().zip(truth) {
        let i = p.binary_search(x).unwrap();
        let j = t.binary_search(y).unwrap();
        table[i][j] += 1;
    }
    Ok(best_injection(&table))
}

/// Maximum total of an injective row-to-column assignment in which rows may
/// stay unassigned.
pub fn best_injection(table: &[Vec<usize>]) -> usize {
    fn go(row: usize, used: &mut Vec<bool>, table: &[Vec<usize>]) -> usize {
        if row == table.len() {
            return 0;
        }
        let mut best = go(row + 1, used, table);
        for col in 0..used.len() {
            if !used[col] {
                used[col] = true;
                best = best.max(table[row][col] + go(row + 1, used, table));
                used[col] = false;
            }
        }
        best
    }
    let cols = table.first().map_or(0, Vec::len);
    go(0, &mut vec![false; cols], table)
}

/// Hungarian-mapped accuracy: best matching divided by the item count.
pub fn brute_accuracy(
    pred: &[usize],
    truth: &[usize],
    budget: OracleBudget,
) -> Result<f64, OracleError> {
    if pred.is_empty() {
        return Ok(1.0);
    }
    Ok(brute_best_matching(pred, truth, budget)? as f64 / pred.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleLinkage {
    Single,
    Complete,
    Average,
}

/// Agglomerates points by recomputing every cluster distance from the raw
/// point distances at each step. Returns the merged member lists in merge
/// order, down to one cluster. Ties go to the pair whose smallest members are
/// lexicographically smallest.
pub fn brute_linkage(
    dist: &[Vec<f64>],
    linkage: OracleLinkage,
) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    let mut clusters: Vec<Vec<usize>> = (0..dist.len()).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let ds: Vec<f64> = clusters[i]
                    .iter()
                    .flat_map(|&a| clusters[j].iter().map(move |&b| dist[a][b]))
                    .collect();
                let d = match linkage {
                    OracleLinkage::Single => ds.iter().cloned().fold(f64::INFINITY, f64::min),
                    OracleLinkage::Complete => ds.iter().cloned().fold(0.0, f64::max),
                    OracleLinkage::Average => ds.iter().sum::<f64>() / ds.len() as f64,
                };
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let (d, i, j) = best.unwrap();
        let b = clusters.remove(j);
        let a = clusters[i].clone();
        clusters[i].extend(b.iter().copied());
        clusters[i].sort_unstable();
        out.push((a, b, d));
    }
    out
}

/// Density-reachability closure for DBSCAN. Returns, per point, the index of
/// its core component (by smallest core member) for core points, `None`
/// otherwise, together with the noise mask. A point's neighborhood includes
/// itself.
pub fn brute_dbscan_cores(
    dist: &[Vec<f64>],
    eps: f64,
    min_pts: usize,
) -> (Vec<Option<usize>>, Vec<bool>) {
    let n = dist.len();
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| dist[i][j] <= eps).count() >= min_pts)
        .collect();
    // reachability matrix between core points, closed transitively
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            reach[i][j] = core[i] && core[j] && dist[i][j] <= eps;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let comp: Vec<Option<usize>> = (0..n)
        .map(|i| core[i].then(|| (0..n).find(|&j| reach[i][j]).unwrap()))
        .collect();
    let noise = (0..n)
        .map(|i| !core[i] && !(0..n).any(|j| core[j] && dist[i][j] <= eps))
        .collect();
    (comp, noise)
}
