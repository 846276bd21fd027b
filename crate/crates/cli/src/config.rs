//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use segrel_core::{
    CommunityAlgorithm, IdfBasis, Linkage, Metric, ScoringFunction, SyntheticSpec, VectorKind,
    WeightingScheme,
};

use crate::error::{CliError, Result};

/// Every key a config file, flag or sweep grid may set.
pub const KEYS: &[&str] = &[
    "corpus",
    "synthetic",
    "topics",
    "segs",
    "vocab",
    "overlap",
    "length",
    "corpus_seed",
    "algo",
    "weighting",
    "score",
    "top_n",
    "t",
    "k",
    "metric",
    "sigma2",
    "eps",
    "min_pts",
    "bandwidth",
    "linkage",
    "vectors",
    "idf",
    "seed",
    "out",
];

const SYNTHETIC_KEYS: &[&str] = &["topics", "segs", "vocab", "overlap", "length", "corpus_seed"];

pub const DEFAULT_TOP_N: usize = 100;

/// Raw configuration: validated key names, unparsed values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut map = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim();
            if map.values.contains_key(key) {
                return Err(CliError::Config(format!("line {}: duplicate key {key}", i + 1)));
            }
            map.set(key, value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {}", i + 1, strip(&e))))?;
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text)
    }

    /// Sets (or overrides) a key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key {key:?}")));
        }
        self.values.insert(key.to_owned(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn to_text(&self) -> String {
        self.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn strip(e: &CliError) -> String {
    match e {
        CliError::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Baseline {
    KMeans,
    Agglomerative,
    Dbscan,
    MeanShift,
    Spectral,
    Nmf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Community,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Community(CommunityAlgorithm),
    Baseline(Baseline),
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Community(c) => c.name(),
            Algorithm::Baseline(b) => match b {
                Baseline::KMeans => "kmeans",
                Baseline::Agglomerative => "agglomerative",
                Baseline::Dbscan => "dbscan",
                Baseline::MeanShift => "meanshift",
                Baseline::Spectral => "spectral",
                Baseline::Nmf => "nmf",
            },
        }
    }

    pub fn family(self) -> Family {
        match self {
            Algorithm::Community(_) => Family::Community,
            Algorithm::Baseline(_) => Family::Baseline,
        }
    }

    /// Algorithm-specific keys this algorithm reads.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Algorithm::Community(CommunityAlgorithm::Walktrap) => &["weighting", "score", "t"],
            Algorithm::Community(_) => &["weighting", "score"],
            Algorithm::Baseline(Baseline::KMeans | Baseline::Nmf) => &["k", "vectors"],
            Algorithm::Baseline(Baseline::MeanShift) => &["bandwidth", "vectors"],
            Algorithm::Baseline(Baseline::Spectral) => &["k", "metric", "sigma2", "vectors"],
            Algorithm::Baseline(Baseline::Agglomerative) => {
                &["k", "linkage", "metric", "sigma2", "vectors"]
            }
            Algorithm::Baseline(Baseline::Dbscan) => &["eps", "min_pts", "metric", "sigma2", "vectors"],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let b = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "kmeans" | "k_means" => Baseline::KMeans,
            "agglomerative" | "hierarchical" => Baseline::Agglomerative,
            "dbscan" => Baseline::Dbscan,
            "meanshift" | "mean_shift" => Baseline::MeanShift,
            "spectral" => Baseline::Spectral,
            "nmf" => Baseline::Nmf,
            _ => {
                return s
                    .parse()
                    .map(Algorithm::Community)
                    .map_err(|_| CliError::Config(format!("unknown algorithm {s:?}")))
            }
        };
        Ok(Algorithm::Baseline(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Synthetic(SyntheticSpec),
}

/// A validated run configuration. Fields the algorithm does not read are
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub source: Source,
    pub algorithm: Algorithm,
    pub weighting: Option<WeightingScheme>,
    pub score: Option<ScoringFunction>,
    pub top_n: usize,
    pub t: Option<usize>,
    pub k: Option<usize>,
    pub metric: Option<Metric>,
    pub eps: Option<f64>,
    pub min_pts: Option<usize>,
    pub bandwidth: Option<f64>,
    pub linkage: Option<Linkage>,
    pub vectors: VectorKind,
    pub idf: IdfBasis,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn parse<T: FromStr>(map: &ConfigMap, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Config(format!("bad value {v:?} for {key}: {e}")))
        })
        .transpose()
}

fn parse_synthetic(map: &ConfigMap) -> Result<Option<SyntheticSpec>> {
    if !map.contains("synthetic") && !SYNTHETIC_KEYS.iter().any(|k| map.contains(k)) {
        return Ok(None);
    }
    let mut spec = SyntheticSpec::default();
    let mut apply = |key: &str, value: &str| -> Result<()> {
        let bad = |e: &dyn fmt::Display| CliError::Config(format!("bad synthetic {key} {value:?}: {e}"));
        match key {
            "topics" => spec.num_topics = value.parse().map_err(|e| bad(&e))?,
            "segs" => spec.segments_per_topic = value.parse().map_err(|e| bad(&e))?,
            "vocab" => spec.vocab_per_topic = value.parse().map_err(|e| bad(&e))?,
            "overlap" => spec.overlap_fraction = value.parse().map_err(|e| bad(&e))?,
            "length" => spec.segment_length = value.parse().map_err(|e| bad(&e))?,
            "seed" | "corpus_seed" => spec.seed = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(CliError::Config(format!("unknown synthetic parameter {key:?}"))),
        }
        Ok(())
    };
    if let Some(text) = map.get("synthetic") {
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty() && *p != "default") {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("synthetic spec part {part:?} is not key=value")))?;
            apply(k.trim(), v.trim())?;
        }
    }
    for key in SYNTHETIC_KEYS {
        if let Some(v) = map.get(key) {
            apply(key, v)?;
        }
    }
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Some(spec))
}

impl PipelineConfig {
    /// Validates a raw map. Returns the config plus one warning per key that
    /// was set but is not read by the chosen algorithm.
    pub fn from_map(map: &ConfigMap) -> Result<(Self, Vec<String>)> {
        let mut missing = Vec::new();
        let synthetic = parse_synthetic(map)?;
        let source = match (map.get("corpus"), synthetic) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("set either corpus or synthetic, not both".into()))
            }
            (Some(path), None) => Some(Source::File(PathBuf::from(path))),
            (None, Some(spec)) => Some(Source::Synthetic(spec)),
            (None, None) => {
                missing.push("corpus or synthetic");
                None
            }
        };
        let algorithm: Option<Algorithm> = parse(map, "algo")?;
        let Some(algorithm) = algorithm else {
            missing.push("algo");
            return Err(CliError::Config(format!("missing required field(s): {}", missing.join(", "))));
        };
        let used = algorithm.keys();
        let mut warnings = Vec::new();
        for (key, _) in map.iter() {
            let common = matches!(key, "algo" | "top_n" | "seed" | "idf" | "out" | "corpus" | "synthetic")
                || SYNTHETIC_KEYS.contains(&key);
            if !common && !used.contains(&key) {
                warnings.push(format!("{key} is ignored by {algorithm}"));
            }
        }
        let wants = |key: &str| used.contains(&key);
        let mut need = |key: &'static str, present: bool| {
            if wants(key) && !present {
                missing.push(key);
            }
        };
        need("weighting", map.contains("weighting"));
        need("score", map.contains("score"));
        need("t", map.contains("t"));
        need("k", map.contains("k"));
        need("linkage", map.contains("linkage"));
        need("metric", map.contains("metric"));
        need("eps", map.contains("eps"));
        need("min_pts", map.contains("min_pts"));
        need("bandwidth", map.contains("bandwidth"));
        let gaussian = map
            .get("metric")
            .is_some_and(|m| matches!(m.to_ascii_lowercase().as_str(), "gaussian" | "rbf"));
        if wants("metric") && gaussian && !map.contains("sigma2") {
            missing.push("sigma2");
        }
        if wants("metric") && !gaussian && map.contains("sigma2") {
            warnings.push("sigma2 is ignored by non-gaussian metrics".into());
        }
        if !missing.is_empty() {
            return Err(CliError::Config(format!(
                "missing required field(s) for {algorithm}: {}",
                missing.join(", ")
            )));
        }
        let only = |key: &str| wants(key);

        let sigma2: Option<f64> = parse(map, "sigma2")?;
        let metric = match map.get("metric").filter(|_| only("metric")) {
            Some(name) => Some(
                Metric::from_name(name, sigma2).map_err(|e| CliError::Config(e.to_string()))?,
            ),
            None => None,
        };
        let vectors = match map.get("vectors").filter(|_| only("vectors")) {
            None => VectorKind::Tfidf,
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "tfidf" => VectorKind::Tfidf,
                "counts" | "count" => VectorKind::Counts,
                _ => return Err(CliError::Config(format!("bad value {v:?} for vectors"))),
            },
        };
        let idf = match map.get("idf") {
            None => IdfBasis::Segments,
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "segments" | "segment" => IdfBasis::Segments,
                "documents" | "document" => IdfBasis::Documents,
                _ => return Err(CliError::Config(format!("bad value {v:?} for idf"))),
            },
        };
        let config = PipelineConfig {
            source: source.expect("missing source reported above"),
            algorithm,
            weighting: if only("weighting") { parse(map, "weighting")? } else { None },
            score: if only("score") { parse(map, "score")? } else { None },
            top_n: parse(map, "top_n")?.unwrap_or(DEFAULT_TOP_N),
            t: if only("t") { parse(map, "t")? } else { None },
            k: if only("k") { parse(map, "k")? } else { None },
            metric,
            eps: if only("eps") { parse(map, "eps")? } else { None },
            min_pts: if only("min_pts") { parse(map, "min_pts")? } else { None },
            bandwidth: if only("bandwidth") { parse(map, "bandwidth")? } else { None },
            linkage: if only("linkage") { parse(map, "linkage")? } else { None },
            vectors,
            idf,
            seed: parse(map, "seed")?.unwrap_or(0),
            out: map.get("out").map(PathBuf::from),
        };
        config.check_values()?;
        Ok((config, warnings))
    }

    fn check_values(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_owned()));
        if self.top_n == 0 {
            return bad("top_n must be at least 1");
        }
        if self.t == Some(0) {
            return bad("t must be at least 1");
        }
        if self.k == Some(0) {
            return bad("k must be at least 1");
        }
        if self.eps.is_some_and(|e| !(e >= 0.0 && e.is_finite())) {
            return bad("eps must be finite and nonnegative");
        }
        if self.min_pts == Some(0) {
            return bad("min_pts must be at least 1");
        }
        if self.bandwidth.is_some_and(|b| !(b > 0.0 && b.is_finite())) {
            return bad("bandwidth must be positive");
        }
        if self.linkage == Some(Linkage::Ward) && self.metric != Some(Metric::Euclidean) {
            return bad("ward linkage needs metric = euclidean");
        }
        Ok(())
    }
}
