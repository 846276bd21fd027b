//! Weighted word co-occurrence graph.

use std::collections::HashMap;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tfidf::{FilteredSegments, TfidfTable};

/// Edge weighting rule for the co-occurrence graph.
///
/// `cooc` is the number of filtered segments containing both words; the
/// tf-idf terms are the per-word best/average aggregates of the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightingScheme {
    Count,
    BestTfidf,
    CountPlusBestTfidf,
    CountPlusAvgTfidf,
}

impl WeightingScheme {
    pub const ALL: [WeightingScheme; 4] = [
        WeightingScheme::Count,
        WeightingScheme::BestTfidf,
        WeightingScheme::CountPlusBestTfidf,
        WeightingScheme::CountPlusAvgTfidf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightingScheme::Count => "count",
            WeightingScheme::BestTfidf => "best-tfidf",
            WeightingScheme::CountPlusBestTfidf => "count+best-tfidf",
            WeightingScheme::CountPlusAvgTfidf => "count+avg-tfidf",
        }
    }

    /// Weight of an edge whose endpoints co-occur in `cooc` segments.
    pub fn edge_weight(self, cooc: u32, a: WordStats, b: WordStats) -> f64 {
        let c = f64::from(cooc);
        match self {
            WeightingScheme::Count => c,
            WeightingScheme::BestTfidf => a.best + b.best,
            WeightingScheme::CountPlusBestTfidf => c + a.best + b.best,
            WeightingScheme::CountPlusAvgTfidf => c + a.avg + b.avg,
        }
    }
}

impl std::fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric() || *c == '+')
            .collect();
        match norm.as_str() {
            "count" => Ok(WeightingScheme::Count),
            "besttfidf" | "best" => Ok(WeightingScheme::BestTfidf),
            "count+besttfidf" | "countbesttfidf" | "countplusbesttfidf" => Ok(WeightingScheme::CountPlusBestTfidf),
            "count+avgtfidf" | "countavgtfidf" | "countplusavgtfidf" => Ok(WeightingScheme::CountPlusAvgTfidf),
            _ => Err(Error::InvalidParameter(format!("unknown weighting scheme {s:?}"))),
        }
    }
}

/// Per-word tf-idf aggregates used by the weighting schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordStats {
    pub best: f64,
    pub avg: f64,
}

impl WordStats {
    fn of(table: &TfidfTable, word: usize) -> Self {
        Self {
            best: table.best_at(word),
            avg: table.avg_at(word),
        }
    }
}

/// Weight given to edges whose scheme weight is zero (both endpoints have
/// zero tf-idf everywhere under [`WeightingScheme::BestTfidf`]).
pub const ZERO_WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Undirected weighted graph without self-loops.
///
/// Nodes carry a label (the word). Neighbor lists are sorted by node index.
#[derive(Debug, Clone)]
pub struct CoGraph {
    labels: Vec<String>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edges: Vec<Edge>,
    degrees: Vec<f64>,
    total_weight: f64,
}

impl CoGraph {
    /// Builds a graph from labeled nodes and an edge list. Rejects
    /// self-loops, repeated edges and non-positive weights.
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) refers to a node outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on node {a}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) has non-positive weight {w}"
                )));
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
            list.push(Edge { a, b, weight: w });
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(j, _)| j);
            if nbrs.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::InvalidParameter("repeated edge".into()));
            }
        }
        list.sort_by_key(|e| (e.a, e.b));
        let degrees: Vec<f64> = adjacency
            .iter()
            .map(|nb| nb.iter().map(|&(_, w)| w).sum())
            .collect();
        let total_weight = list.iter().map(|e| e.weight).sum();
        Ok(Self {
            labels,
            adjacency,
            edges: list,
            degrees,
            total_weight,
        })
    }

    /// Graph on `n` nodes labeled `"0"`, `"1"`, ...
    pub fn with_nodes<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::from_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weight of edge (a, b), if present.
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        let nb = &self.adjacency[a];
        nb.binary_search_by_key(&b, |&(j, _)| j).ok().map(|i| nb[i].1)
    }

    /// Weighted degree.
    pub fn degree(&self, node: usize) -> f64 {
        self.degrees[node]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Sum of edge weights (`m`).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                for &(v, _) in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        members.push(v);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Writes one `label_a<TAB>label_b<TAB>weight` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(out, "{}\t{}\t{}", self.labels[e.a], self.labels[e.b], e.weight)?;
        }
        Ok(())
    }
}

/// Builds the co-occurrence graph over the filtered segments.
///
/// Nodes are the kept words that co-occur with at least one other word, in
/// vocabulary order; words that only ever appear alone are dropped.
pub fn build_graph(
    filtered: &FilteredSegments,
    table: &TfidfTable,
    scheme: WeightingScheme,
) -> Result<CoGraph> {
    if filtered.segment_count() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut cooc: HashMap<(usize, usize), u32> = HashMap::new();
    for kept in filtered.iter() {
        let mut words = kept.to_vec();
        words.sort_unstable();
        words.dedup();
        for (i, &a) in words.iter().enumerate() {
            for &b in &words[i + 1..] {
                *cooc.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    let mut pairs: Vec<((usize, usize), u32)> = cooc.into_iter().collect();
    pairs.sort_unstable_by_key(|&(p, _)| p);

    let mut present = vec![false; table.vocabulary().len()];
    for &((a, b), _) in &pairs {
        present[a] = true;
        present[b] = true;
    }
    let mut node_of = vec![usize::MAX; present.len()];
    let mut labels = Vec::new();
    for (w, _) in present.iter().enumerate().filter(|(_, p)| **p) {
        node_of[w] = labels.len();
        labels.push(table.word(w).to_string());
    }
    let edges = pairs
        .into_iter()
        .map(|((a, b), c)| {
            let w = scheme.edge_weight(c, WordStats::of(table, a), WordStats::of(table, b));
            (node_of[a], node_of[b], w.max(ZERO_WEIGHT_FLOOR))
        });
    CoGraph::from_edges(labels, edges)
}
