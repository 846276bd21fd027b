//! Segmented corpora: JSON loading, tokenization and a planted-topic
//! synthetic generator.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

const STOPWORDS: &str = include_str!("../data/stopwords.txt");

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect()
    })
}

/// Lowercases `text`, splits it into maximal runs of alphanumeric
/// characters and drops stopwords. Repeated words are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    let stop = stopwords();
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !stop.contains(t))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub id: String,
    pub document_id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub topic_label: Option<String>,
}

impl Segment {
    pub fn new(
        id: impl Into<String>,
        document_id: impl Into<String>,
        text: impl Into<String>,
        topic_label: Option<String>,
    ) -> Self {
        let text = text.into();
        Self {
            id: id.into(),
            document_id: document_id.into(),
            tokens: tokenize(&text),
            text,
            topic_label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub media: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    segments: Vec<Segment>,
    documents: Vec<Document>,
}

impl Corpus {
    /// Validates segment id uniqueness and document membership.
    pub fn new(documents: Vec<Document>, segments: Vec<Segment>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &segments {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::DuplicateSegmentId(s.id.clone()));
            }
        }
        let docs: HashSet<&str> = documents.iter().map(|d| d.id.as_str()).collect();
        if let Some(s) = segments
            .iter()
            .find(|s| !docs.contains(s.document_id.as_str()))
        {
            return Err(Error::InvalidParameter(format!(
                "segment {:?} refers to unknown document {:?}",
                s.id, s.document_id
            )));
        }
        Ok(Self {
            segments,
            documents,
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Ground-truth partition from the topic labels, or `None` if any
    /// segment is unlabeled.
    pub fn ground_truth(&self) -> Option<Partition> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let t = s.topic_label.as_deref()?;
            let next = ids.len();
            labels.push(*ids.entry(t).or_insert(next));
        }
        Some(Partition::from_labels(labels).canonical())
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: CorpusFile = serde_json::from_str(json).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut documents = Vec::with_capacity(file.documents.len());
        let mut segments = Vec::new();
        for d in file.documents {
            for s in d.segments {
                segments.push(Segment::new(s.id, d.id.clone(), s.text, s.topic_label));
            }
            documents.push(Document {
                id: d.id,
                media: d.media,
            });
        }
        Corpus::new(documents, segments)
    }

    pub fn to_json_string(&self) -> String {
        let documents = self
            .documents
            .iter()
            .map(|d| DocumentRecord {
                id: d.id.clone(),
                media: d.media.clone(),
                segments: self
                    .segments
                    .iter()
                    .filter(|s| s.document_id == d.id)
                    .map(|s| SegmentRecord {
                        id: s.id.clone(),
                        text: s.text.clone(),
                        topic_label: s.topic_label.clone(),
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&CorpusFile { documents }).expect("corpus serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n").map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusFile {
    documents: Vec<DocumentRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentRecord {
    id: String,
    media: String,
    segments: Vec<SegmentRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord {
    id: String,
    text: String,
    topic_label: Option<String>,
}

pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Corpus::from_json_str(&text)
}

/// Parameters of the planted-topic corpus generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub num_topics: usize,
    pub segments_per_topic: usize,
    pub vocab_per_topic: usize,
    /// Fraction of every topic vocabulary drawn from the shared pool.
    pub overlap_fraction: f64,
    /// Tokens per segment.
    pub segment_length: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            num_topics: 5,
            segments_per_topic: 10,
            vocab_per_topic: 40,
            overlap_fraction: 0.0,
            segment_length: 120,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("num_topics", self.num_topics),
            ("segments_per_topic", self.segments_per_topic),
            ("vocab_per_topic", self.vocab_per_topic),
            ("segment_length", self.segment_length),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
            }
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidParameter(format!(
                "overlap_fraction {} is outside [0, 1]",
                self.overlap_fraction
            )));
        }
        Ok(())
    }

    /// Number of words every topic takes from the shared pool.
    pub fn shared_words(&self) -> usize {
        (self.overlap_fraction * self.vocab_per_topic as f64).floor() as usize
    }

    /// Vocabulary of every topic, as the generator draws it for this seed.
    pub fn topic_vocabularies(&self) -> Vec<Vec<String>> {
        self.draw_vocabularies(&mut crate::seeded_rng(self.seed))
    }

    // The pool holds `vocab_per_topic` words and each topic picks its
    // `shared_words()` of them independently, so partial overlap varies from
    // pair to pair; at overlap 1 every topic holds the whole pool.
    fn draw_vocabularies<R: Rng>(&self, rng: &mut R) -> Vec<Vec<String>> {
        let shared = self.shared_words();
        (0..self.num_topics)
            .map(|topic| {
                let mut picks = rand::seq::index::sample(rng, self.vocab_per_topic, shared).into_vec();
                picks.sort_unstable();
                picks
                    .into_iter()
                    .map(|i| format!("shared{i}"))
                    .chain((shared..self.vocab_per_topic).map(|i| format!("t{topic}w{i}")))
                    .collect()
            })
            .collect()
    }
}

/// Generates `segments_per_topic` documents, each holding one segment per
/// topic. Segment tokens are drawn uniformly from the topic vocabulary.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = crate::seeded_rng(spec.seed);
    let vocabularies = spec.draw_vocabularies(&mut rng);
    let mut documents = Vec::with_capacity(spec.segments_per_topic);
    let mut segments = Vec::with_capacity(spec.segments_per_topic * spec.num_topics);
    for d in 0..spec.segments_per_topic {
        let doc_id = format!("doc{d}");
        for (t, vocab) in vocabularies.iter().enumerate() {
            let words: Vec<&str> = (0..spec.segment_length)
                .map(|_| vocab[rng.random_range(0..vocab.len())].as_str())
                .collect();
            segments.push(Segment::new(
                format!("doc{d}-seg{t}"),
                doc_id.clone(),
                words.join(" "),
                Some(format!("topic{t}")),
            ));
        }
        documents.push(Document {
            id: doc_id,
            media: "synthetic".to_string(),
        });
    }
    Corpus::new(documents, segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("The AVL tree, the BST!"), ["avl", "tree", "bst"]);
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("rotation rotation Rotation"),
            ["rotation", "rotation", "rotation"]
        );
    }

    const TWO_BY_TWO: &str = r#"{"documents": [
        {"id": "d1", "media": "text", "segments": [
            {"id": "s1", "text": "AVL trees rotate", "topic_label": "avl"},
            {"id": "s2", "text": "binary search", "topic_label": "bst"}]},
        {"id": "d2", "media": "video", "segments": [
            {"id": "s3", "text": "rotations in AVL trees", "topic_label": "avl"},
            {"id": "s4", "text": "", "topic_label": null}]}
    ]}"#;

    #[test]
    fn load_preserves_order() {
        let c = Corpus::from_json_str(TWO_BY_TWO).unwrap();
        let ids: Vec<_> = c.segments().iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["s1", "s2", "s3", "s4"]);
        assert_eq!(c.documents().len(), 2);
        assert_eq!(c.segments()[2].document_id, "d2");
        assert!(c.segments()[3].tokens.is_empty());
        assert!(c.ground_truth().is_none());
    }

    #[test]
    fn duplicate_segment_id_rejected() {
        let json = r#"{"documents": [{"id": "d", "media": "text", "segments": [
            {"id": "s1", "text": "a", "topic_label": null},
            {"id": "s1", "text": "b", "topic_label": null}]}]}"#;
        assert!(matches!(
            Corpus::from_json_str(json),
            Err(Error::DuplicateSegmentId(id)) if id == "s1"
        ));
    }

    #[test]
    fn malformed_file_reports_position_and_field() {
        let json = "{\"documents\": [\n {\"id\": \"d\", \"segments\": []}]}";
        match Corpus::from_json_str(json) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("media"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let c = Corpus::from_json_str(TWO_BY_TWO).unwrap();
        let again = Corpus::from_json_str(&c.to_json_string()).unwrap();
        assert_eq!(c, again);
    }

    fn topic_sets(c: &Corpus, topics: usize) -> Vec<HashSet<String>> {
        let mut sets = vec![HashSet::new(); topics];
        for s in c.segments() {
            let t: usize = s.topic_label.as_ref().unwrap()[5..].parse().unwrap();
            sets[t].extend(s.tokens.iter().cloned());
        }
        sets
    }

    #[test]
    fn synthetic_disjoint_without_overlap() {
        let spec = SyntheticSpec {
            num_topics: 3,
            segments_per_topic: 4,
            overlap_fraction: 0.0,
            seed: 7,
            ..Default::default()
        };
        let c = generate_synthetic(&spec).unwrap();
        assert_eq!(c.len(), 12);
        let sets = topic_sets(&c, 3);
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(sets[i].is_disjoint(&sets[j]));
            }
        }
        assert_eq!(c.ground_truth().unwrap().k(), 3);
    }

    #[test]
    fn synthetic_identical_with_full_overlap() {
        let spec = SyntheticSpec {
            num_topics: 2,
            overlap_fraction: 1.0,
            ..Default::default()
        };
        let vocabs = spec.topic_vocabularies();
        assert_eq!(vocabs[0], vocabs[1]);
        let c = generate_synthetic(&spec).unwrap();
        let allowed: HashSet<String> = vocabs[0].iter().cloned().collect();
        for set in topic_sets(&c, 2) {
            assert!(set.is_subset(&allowed));
        }
    }

    #[test]
    fn partial_overlap_draws_from_the_pool() {
        let spec = SyntheticSpec { overlap_fraction: 0.5, ..Default::default() };
        let vocabs = spec.topic_vocabularies();
        for v in &vocabs {
            assert_eq!(v.len(), 40);
            let shared: Vec<&String> = v.iter().filter(|w| w.starts_with("shared")).collect();
            assert_eq!(shared.len(), 20);
            for w in shared {
                assert!(w["shared".len()..].parse::<usize>().unwrap() < 40);
            }
        }
        // independent picks: not every topic gets the same subset
        assert!(vocabs.iter().any(|v| v[..20] != vocabs[0][..20]));
    }

    #[test]
    fn synthetic_is_deterministic() {
        let spec = SyntheticSpec::default();
        let a = generate_synthetic(&spec).unwrap().to_json_string();
        let b = generate_synthetic(&spec).unwrap().to_json_string();
        assert_eq!(a, b);
        let other = generate_synthetic(&SyntheticSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, other.to_json_string());
    }

    #[test]
    fn synthetic_rejects_bad_spec() {
        let spec = SyntheticSpec {
            overlap_fraction: 1.5,
            ..Default::default()
        };
        assert!(generate_synthetic(&spec).is_err());
        let spec = SyntheticSpec {
            vocab_per_topic: 0,
            ..Default::default()
        };
        assert!(generate_synthetic(&spec).is_err());
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent(text in "\\PC{0,60}") {
            let once = tokenize(&text);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }
    }
}
