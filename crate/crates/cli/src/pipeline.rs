use std::time::Instant;

use serde::Serialize;
use segrel_core::assign::communities_as_word_sets;
use segrel_core::baselines::{
    agglomerative, dbscan, kmeans, meanshift, nmf, similarity, spectral, vectorize_filtered,
};
use segrel_core::{
    assign_segments, build_graph, evaluate, generate_synthetic, load_corpus, tfidf, Corpus,
    EvalReport, Partition,
};

use crate::config::{Algorithm, Baseline, PipelineConfig, Source};
use crate::error::{CliError, Result};

/// Rounds to the six decimals written to CSV so that emitted files parse
/// back to identical values.
pub fn quantize(x: f64) -> f64 {
    format!("{x:.6}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub ari: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

impl From<&EvalReport> for Metrics {
    fn from(r: &EvalReport) -> Self {
        Metrics {
            ari: quantize(r.ari),
            precision: quantize(r.precision),
            recall: quantize(r.recall),
            f1: quantize(r.f1),
            accuracy: quantize(r.accuracy),
        }
    }
}

/// One result row: the relevant configuration, the number of clusters found
/// and the metrics (absent when the corpus has no topic labels).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub algo: String,
    pub weighting: Option<String>,
    pub score_fn: Option<String>,
    pub top_n: usize,
    pub t: Option<usize>,
    pub k: Option<usize>,
    pub metric: Option<String>,
    pub sigma2: Option<f64>,
    pub eps: Option<f64>,
    pub min_pts: Option<usize>,
    pub bandwidth: Option<f64>,
    pub seed: u64,
    pub k_found: usize,
    pub metrics: Option<Metrics>,
    pub wall_time_ms: f64,
}

impl RunResult {
    fn echo(config: &PipelineConfig, k_found: usize, metrics: Option<Metrics>, wall_time_ms: f64) -> Self {
        RunResult {
            algo: config.algorithm.name().to_owned(),
            weighting: config.weighting.map(|w| w.name().to_owned()),
            score_fn: config.score.map(|s| s.name().to_owned()),
            top_n: config.top_n,
            t: config.t,
            k: config.k,
            metric: config.metric.map(|m| m.name().to_owned()),
            sigma2: config.metric.and_then(|m| m.sigma2()),
            eps: config.eps,
            min_pts: config.min_pts,
            bandwidth: config.bandwidth,
            seed: config.seed,
            k_found,
            metrics,
            wall_time_ms: quantize(wall_time_ms),
        }
    }

    /// The row with its timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        RunResult { wall_time_ms: 0.0, ..self.clone() }
    }
}

pub fn load_source(source: &Source) -> Result<Corpus> {
    Ok(match source {
        Source::File(path) => load_corpus(path)?,
        Source::Synthetic(spec) => generate_synthetic(spec)?,
    })
}

fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Config(format!("missing required field {key}")))
}

/// Clusters the corpus segments as the configuration describes.
pub fn cluster_segments(config: &PipelineConfig, corpus: &Corpus) -> Result<Partition> {
    let table = tfidf::compute_tfidf_with(corpus, config.idf)?;
    let filtered = tfidf::top_n_filter(&table, config.top_n)?;
    let partition = match config.algorithm {
        Algorithm::Community(algo) => {
            let graph = build_graph(&filtered, &table, required(config.weighting, "weighting")?)?;
            // with no co-occurring words there are no communities and every
            // segment ends up alone
            let communities = if graph.is_empty() {
                Vec::new()
            } else {
                let words = algo.detect(&graph, config.seed, config.t.unwrap_or(1))?;
                communities_as_word_sets(&graph, &words, &table)?
            };
            assign_segments(&filtered, &communities, required(config.score, "score")?, &table)?
        }
        Algorithm::Baseline(b) => {
            let m = vectorize_filtered(&table, &filtered, config.vectors);
            let sim = || -> Result<_> { Ok(similarity(&m, required(config.metric, "metric")?)?) };
            match b {
                Baseline::KMeans => kmeans(m.data(), required(config.k, "k")?, config.seed)?.partition,
                Baseline::Nmf => nmf(m.data(), required(config.k, "k")?, config.seed)?.partition,
                Baseline::MeanShift => meanshift(m.data(), required(config.bandwidth, "bandwidth")?)?,
                Baseline::Spectral => spectral(&sim()?, required(config.k, "k")?, config.seed)?,
                Baseline::Agglomerative => agglomerative(
                    &sim()?,
                    required(config.linkage, "linkage")?,
                    required(config.k, "k")?,
                )?,
                Baseline::Dbscan => {
                    dbscan(&sim()?, required(config.eps, "eps")?, required(config.min_pts, "min_pts")?)?
                        .partition
                }
            }
        }
    };
    Ok(partition)
}

/// Runs one configuration end to end.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunResult> {
    let start = Instant::now();
    let corpus = load_source(&config.source)?;
    let partition = cluster_segments(config, &corpus)?;
    let metrics = match corpus.ground_truth() {
        Some(truth) => Some(Metrics::from(&evaluate(&partition, &truth)?)),
        None => None,
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunResult::echo(config, partition.k(), metrics, elapsed))
}
