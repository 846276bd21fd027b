//! Parameter grids and parallel sweeps.

use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{ConfigMap, PipelineConfig, KEYS};
use crate::error::{CliError, Result};
use crate::pipeline::{run_pipeline, RunResult};

/// One swept key and its values, in sweep order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridParam {
    pub key: String,
    pub values: Vec<String>,
}

fn format_number(x: f64) -> String {
    let r = (x * 1e12).round() / 1e12;
    format!("{r}")
}

fn expand_range(spec: &str) -> Result<Option<Vec<String>>> {
    let Some((lo, rest)) = spec.split_once("..") else {
        return Ok(None);
    };
    let (hi, step) = match rest.split_once(':') {
        Some((h, s)) => (h, Some(s)),
        None => (rest, None),
    };
    let bad = || CliError::Config(format!("bad range {spec:?}"));
    let ints = (lo.trim().parse::<i64>(), hi.trim().parse::<i64>(), step.map(|s| s.trim().parse::<i64>()));
    if let (Ok(a), Ok(b), None | Some(Ok(_))) = &ints {
        let step = match &ints.2 {
            Some(Ok(s)) => *s,
            _ => 1,
        };
        if step <= 0 || a > b {
            return Err(bad());
        }
        return Ok(Some((*a..=*b).step_by(step as usize).map(|v| v.to_string()).collect()));
    }
    let a: f64 = lo.trim().parse().map_err(|_| bad())?;
    let b: f64 = hi.trim().parse().map_err(|_| bad())?;
    let step: f64 = step
        .ok_or_else(|| CliError::Config(format!("range {spec:?} needs a step, as in a..b:step")))?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    if !(step > 0.0) || !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok(Some((0..count).map(|i| format_number(a + i as f64 * step)).collect()))
}

impl FromStr for GridParam {
    type Err = CliError;

    /// `key=a..b`, `key=a..b:step` or `key=v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (key, spec) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("grid entry {s:?} is not key=values")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown grid key {key:?}")));
        }
        let values = match expand_range(spec.trim())? {
            Some(v) => v,
            None => spec.split(',').map(|v| v.trim().to_owned()).filter(|v| !v.is_empty()).collect(),
        };
        if values.is_empty() {
            return Err(CliError::Config(format!("grid entry for {key} has no values")));
        }
        Ok(GridParam { key: key.to_owned(), values })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grid {
    pub params: Vec<GridParam>,
}

impl Grid {
    /// Parses grid entries; each string may hold several entries separated
    /// by `;`.
    pub fn parse<S: AsRef<str>>(specs: &[S]) -> Result<Self> {
        let mut params: Vec<GridParam> = Vec::new();
        for spec in specs {
            for part in spec.as_ref().split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let p: GridParam = part.parse()?;
                if params.iter().any(|q| q.key == p.key) {
                    return Err(CliError::Config(format!("{} appears twice in the grid", p.key)));
                }
                params.push(p);
            }
        }
        Ok(Grid { params })
    }

    /// Cartesian product, first parameter outermost.
    pub fn points(&self) -> Vec<Vec<(String, String)>> {
        let mut points = vec![Vec::new()];
        for p in &self.params {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    p.values.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push((p.key.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: Vec<(String, String)>,
    pub config: ConfigMap,
    pub warnings: Vec<String>,
    pub outcome: std::result::Result<RunResult, String>,
}

/// Index of the best row per metric; ties go to the earliest row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BestRows {
    pub ari: Option<usize>,
    pub precision: Option<usize>,
    pub recall: Option<usize>,
    pub f1: Option<usize>,
    pub accuracy: Option<usize>,
}

impl BestRows {
    pub fn compute(rows: &[SweepRow]) -> Self {
        let best = |get: fn(&crate::pipeline::Metrics) -> f64| {
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in rows.iter().enumerate() {
                if let Ok(RunResult { metrics: Some(m), .. }) = &row.outcome {
                    let v = get(m);
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((i, v));
                    }
                }
            }
            best.map(|(i, _)| i)
        };
        BestRows {
            ari: best(|m| m.ari),
            precision: best(|m| m.precision),
            recall: best(|m| m.recall),
            f1: best(|m| m.f1),
            accuracy: best(|m| m.accuracy),
        }
    }

    /// Metric names for which `row` is the best row.
    pub fn flags(&self, row: usize) -> Vec<&'static str> {
        [
            ("ari", self.ari),
            ("precision", self.precision),
            ("recall", self.recall),
            ("f1", self.f1),
            ("accuracy", self.accuracy),
        ]
        .into_iter()
        .filter(|(_, r)| *r == Some(row))
        .map(|(name, _)| name)
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub grid: Grid,
    pub rows: Vec<SweepRow>,
    pub best: BestRows,
}

impl SweepOutcome {
    pub fn results(&self) -> impl Iterator<Item = &RunResult> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &str)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.outcome.as_ref().err().map(|e| (i, e.as_str())))
    }
}

fn run_point(base: &ConfigMap, point: &[(String, String)]) -> SweepRow {
    let mut config = base.clone();
    let mut warnings = Vec::new();
    let outcome = (|| {
        for (k, v) in point {
            config.set(k, v.clone())?;
        }
        let (c, w) = PipelineConfig::from_map(&config)?;
        warnings = w;
        run_pipeline(&c)
    })()
    .map_err(|e| e.to_string());
    SweepRow { point: point.to_vec(), config, warnings, outcome }
}

/// Runs every grid point against `base` on up to `jobs` threads. Rows come
/// back in grid order; a failing point is recorded and the sweep goes on.
pub fn sweep(base: &ConfigMap, grid: &Grid, jobs: usize) -> Result<SweepOutcome> {
    if jobs == 0 {
        return Err(CliError::Config("jobs must be at least 1".into()));
    }
    let points = grid.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Output(format!("cannot start worker threads: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| points.par_iter().map(|p| run_point(base, p)).collect());
    let best = BestRows::compute(&rows);
    Ok(SweepOutcome { grid: grid.clone(), rows, best })
}
