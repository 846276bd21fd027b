//! Clustering agreement metrics.
//!
//! Degenerate denominators follow fixed conventions: ARI is 1 when both
//! partitions are all-singletons or both a single cluster, pairwise precision
//! and recall are 1 when no pair was predicted (or expected) together, and F1
//! is 0 when both are 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::Partition;

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// `K_pred x K_true` co-membership counts.
pub fn contingency(pred: &Partition, truth: &Partition) -> Result<Vec<Vec<u64>>> {
    if pred.len() != truth.len() {
        return Err(Error::PartitionMismatch {
            expected: truth.len(),
            found: pred.len(),
        });
    }
    let mut table = vec![vec![0u64; truth.k()]; pred.k()];
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        table[p][t] += 1;
    }
    Ok(table)
}

struct PairCounts {
    together_both: u64,
    together_pred: u64,
    together_truth: u64,
    total: u64,
}

fn pair_counts(table: &[Vec<u64>], n: usize) -> PairCounts {
    let cols = table.first().map_or(0, Vec::len);
    let together_both = table.iter().flatten().map(|&c| pairs(c)).sum();
    let together_pred = table.iter().map(|row| pairs(row.iter().sum())).sum();
    let together_truth = (0..cols)
        .map(|j| pairs(table.iter().map(|row| row[j]).sum()))
        .sum();
    PairCounts {
        together_both,
        together_pred,
        together_truth,
        total: pairs(n as u64),
    }
}

/// Adjusted Rand index.
pub fn ari(pred: &Partition, truth: &Partition) -> Result<f64> {
    let table = contingency(pred, truth)?;
    let c = pair_counts(&table, pred.len());
    if c.total == 0 {
        return Ok(1.0);
    }
    let index = c.together_both as f64;
    let (a, b) = (c.together_pred as f64, c.together_truth as f64);
    let expected = a * b / c.total as f64;
    let max = (a + b) / 2.0;
    if max - expected == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 over co-clustered item pairs.
pub fn pairwise_f1(pred: &Partition, truth: &Partition) -> Result<PairScores> {
    let table = contingency(pred, truth)?;
    let c = pair_counts(&table, pred.len());
    let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.together_both, c.together_pred);
    let recall = ratio(c.together_both, c.together_truth);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(PairScores {
        precision,
        recall,
        f1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Column matched to each row, `None` for rows left unmatched when the
    /// table has more rows than columns.
    pub mapping: Vec<Option<usize>>,
    pub total: u64,
}

/// Maximum-weight injective row-to-column matching (Hungarian algorithm
/// with potentials). Rectangular tables are zero-padded to square.
pub fn kuhn_munkres(table: &[Vec<u64>]) -> Matching {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    if n == 0 {
        return Matching {
            mapping: Vec::new(),
            total: 0,
        };
    }
    let score = |i: usize, j: usize| -> i64 {
        if i < rows && j < cols {
            table[i][j] as i64
        } else {
            0
        }
    };
    // minimize cost = -score; arrays are 1-based with index 0 as the sentinel
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut mapping = vec![None; rows];
    let mut total = 0;
    for j in 1..=n {
        let i = row_of[j];
        if i >= 1 && i - 1 < rows && j - 1 < cols {
            mapping[i - 1] = Some(j - 1);
            total += table[i - 1][j - 1];
        }
    }
    Matching { mapping, total }
}

/// Fraction of items in their matched cluster under the best one-to-one
/// mapping between predicted and true clusters.
pub fn accuracy(pred: &Partition, truth: &Partition) -> Result<f64> {
    let table = contingency(pred, truth)?;
    if pred.is_empty() {
        return Ok(1.0);
    }
    Ok(kuhn_munkres(&table).total as f64 / pred.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub ari: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub contingency: Vec<Vec<u64>>,
}

pub fn evaluate(pred: &Partition, truth: &Partition) -> Result<EvalReport> {
    let pair = pairwise_f1(pred, truth)?;
    Ok(EvalReport {
        ari: ari(pred, truth)?,
        precision: pair.precision,
        recall: pair.recall,
        f1: pair.f1,
        accuracy: accuracy(pred, truth)?,
        contingency: contingency(pred, truth)?,
    })
}
