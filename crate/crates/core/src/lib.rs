//! Cross-document topic segment linking through word communities.
//!
//! The pipeline turns a segmented corpus into a weighted word co-occurrence
//! graph, detects word communities on it, maps every segment to its highest
//! scoring community and evaluates the induced segment clustering:
//!
//! ```text
//! corpus -> tfidf -> top-n filter -> cograph -> community -> assign -> eval
//! ```
//!
//! The [`baselines`] module holds the vector-space clustering algorithms the
//! graph approach is compared against.

pub mod assign;
pub mod baselines;
pub mod cograph;
pub mod community;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod partition;
pub mod tfidf;

pub use assign::{assign_segments, ScoringFunction};
pub use baselines::{Linkage, Metric, SegmentMatrix, SimilarityMatrix, VectorKind};
pub use cograph::{build_graph, CoGraph, WeightingScheme};
pub use community::{modularity, CommunityAlgorithm};
pub use corpus::{generate_synthetic, load_corpus, tokenize, Corpus, Segment, SyntheticSpec};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalReport};
pub use partition::{Dendrogram, Merge, Partition};
pub use tfidf::{compute_tfidf, top_n_filter, FilteredSegments, IdfBasis, TfidfTable};

pub(crate) fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
