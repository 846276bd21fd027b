//! Per-segment tf-idf and the top-n vocabulary cutoff.
//!
//! tf is the raw count of a word in a segment and idf is `ln(N / df)` with no
//! smoothing. By default the idf "documents" are the segments themselves.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Unit over which document frequency is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfBasis {
    #[default]
    Segments,
    Documents,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEntry {
    pub word: usize,
    pub count: u32,
    pub value: f64,
}

/// tf-idf values for every (word, segment) pair with an occurrence.
///
/// Words are interned into a lexicographically sorted vocabulary, so word id
/// order equals string order.
#[derive(Debug, Clone)]
pub struct TfidfTable {
    words: Vec<String>,
    index: HashMap<String, usize>,
    segment_ids: Vec<String>,
    segment_index: HashMap<String, usize>,
    entries: Vec<Vec<TermEntry>>,
    best: Vec<f64>,
    avg: Vec<f64>,
    basis: IdfBasis,
}

impl TfidfTable {
    pub fn vocabulary(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn segment_count(&self) -> usize {
        self.entries.len()
    }

    pub fn segment_ids(&self) -> &[String] {
        &self.segment_ids
    }

    pub fn basis(&self) -> IdfBasis {
        self.basis
    }

    /// Occurring words of segment `seg`, sorted by word id.
    pub fn entries(&self, seg: usize) -> &[TermEntry] {
        &self.entries[seg]
    }

    pub fn value_at(&self, word: usize, seg: usize) -> f64 {
        let e = &self.entries[seg];
        e.binary_search_by_key(&word, |t| t.word)
            .map_or(0.0, |i| e[i].value)
    }

    /// tf-idf of `word` in the segment with id `segment_id`; 0 when absent.
    pub fn value(&self, word: &str, segment_id: &str) -> f64 {
        match (self.word_id(word), self.segment_index.get(segment_id)) {
            (Some(w), Some(&s)) => self.value_at(w, s),
            _ => 0.0,
        }
    }

    pub fn best_at(&self, word: usize) -> f64 {
        self.best[word]
    }

    pub fn avg_at(&self, word: usize) -> f64 {
        self.avg[word]
    }

    /// Maximum tf-idf of `word` over all segments.
    pub fn best(&self, word: &str) -> Option<f64> {
        self.word_id(word).map(|w| self.best[w])
    }

    /// Mean tf-idf of `word` over the segments it occurs in.
    pub fn avg(&self, word: &str) -> Option<f64> {
        self.word_id(word).map(|w| self.avg[w])
    }
}

pub fn compute_tfidf(corpus: &Corpus) -> Result<TfidfTable> {
    compute_tfidf_with(corpus, IdfBasis::Segments)
}

pub fn compute_tfidf_with(corpus: &Corpus, basis: IdfBasis) -> Result<TfidfTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut vocab = std::collections::BTreeSet::new();
    for s in corpus.segments() {
        vocab.extend(s.tokens.iter().map(String::as_str));
    }
    let words: Vec<String> = vocab.into_iter().map(str::to_string).collect();
    let index: HashMap<String, usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();

    let counts: Vec<BTreeMap<usize, u32>> = corpus
        .segments()
        .iter()
        .map(|s| {
            let mut m = BTreeMap::new();
            for t in &s.tokens {
                *m.entry(index[t]).or_insert(0) += 1;
            }
            m
        })
        .collect();

    let mut df = vec![0usize; words.len()];
    let units = match basis {
        IdfBasis::Segments => {
            for c in &counts {
                for &w in c.keys() {
                    df[w] += 1;
                }
            }
            corpus.len()
        }
        IdfBasis::Documents => {
            let mut doc_words: BTreeMap<&str, std::collections::BTreeSet<usize>> = BTreeMap::new();
            for (s, c) in corpus.segments().iter().zip(&counts) {
                doc_words
                    .entry(s.document_id.as_str())
                    .or_default()
                    .extend(c.keys().copied());
            }
            for set in doc_words.values() {
                for &w in set {
                    df[w] += 1;
                }
            }
            corpus.documents().len()
        }
    };
    let idf: Vec<f64> = df
        .iter()
        .map(|&d| (units as f64 / d as f64).ln())
        .collect();

    let entries: Vec<Vec<TermEntry>> = counts
        .iter()
        .map(|c| {
            c.iter()
                .map(|(&word, &count)| TermEntry {
                    word,
                    count,
                    value: count as f64 * idf[word],
                })
                .collect()
        })
        .collect();

    let mut best = vec![0.0f64; words.len()];
    let mut sum = vec![0.0f64; words.len()];
    let mut occurrences = vec![0usize; words.len()];
    for seg in &entries {
        for e in seg {
            best[e.word] = best[e.word].max(e.value);
            sum[e.word] += e.value;
            occurrences[e.word] += 1;
        }
    }
    let avg = sum
        .iter()
        .zip(&occurrences)
        .map(|(s, &n)| if n == 0 { 0.0 } else { s / n as f64 })
        .collect();

    let segment_ids: Vec<String> = corpus.segments().iter().map(|s| s.id.clone()).collect();
    let segment_index = segment_ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(TfidfTable {
        words,
        index,
        segment_ids,
        segment_index,
        entries,
        best,
        avg,
        basis,
    })
}

/// Per-segment top-n words by tf-idf.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSegments {
    n: usize,
    kept: Vec<Vec<usize>>,
}

impl FilteredSegments {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Kept word ids of segment `seg`, by descending tf-idf then word.
    pub fn kept(&self, seg: usize) -> &[usize] {
        &self.kept[seg]
    }

    pub fn kept_words<'a>(&self, seg: usize, table: &'a TfidfTable) -> Vec<&'a str> {
        self.kept[seg].iter().map(|&w| table.word(w)).collect()
    }

    pub fn segment_count(&self) -> usize {
        self.kept.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.kept.iter().map(Vec::as_slice)
    }
}

pub fn top_n_filter(table: &TfidfTable, n: usize) -> Result<FilteredSegments> {
    if n == 0 {
        return Err(Error::InvalidParameter("top_n must be at least 1".into()));
    }
    let kept = (0..table.segment_count())
        .map(|s| {
            let mut e: Vec<&TermEntry> = table.entries(s).iter().collect();
            // word ids are lexicographic ranks, so the id breaks value ties
            e.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.word.cmp(&b.word)));
            e.truncate(n);
            e.into_iter().map(|t| t.word).collect()
        })
        .collect();
    Ok(FilteredSegments { n, kept })
}
