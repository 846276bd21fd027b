//! CSV, JSON and SVG result files.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde_json::json;

use crate::error::{CliError, Result};
use crate::pipeline::{Metrics, RunResult};
use crate::sweep::SweepOutcome;

pub const CSV_COLUMNS: [&str; 19] = [
    "algo",
    "weighting",
    "score_fn",
    "top_n",
    "t",
    "k",
    "metric",
    "sigma2",
    "eps",
    "min_pts",
    "bandwidth",
    "seed",
    "k_found",
    "ari",
    "precision",
    "recall",
    "f1",
    "accuracy",
    "wall_time_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    /// Picks the format from a file extension, CSV by default.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("json") => Format::Json,
            Some("svg") => Format::Svg,
            _ => Format::Csv,
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

pub fn to_record(r: &RunResult) -> Vec<String> {
    let m = |f: fn(&Metrics) -> f64| r.metrics.as_ref().map(|m| fixed(f(m))).unwrap_or_default();
    vec![
        r.algo.clone(),
        opt(&r.weighting),
        opt(&r.score_fn),
        r.top_n.to_string(),
        opt(&r.t),
        opt(&r.k),
        opt(&r.metric),
        opt(&r.sigma2),
        opt(&r.eps),
        opt(&r.min_pts),
        opt(&r.bandwidth),
        r.seed.to_string(),
        r.k_found.to_string(),
        m(|m| m.ari),
        m(|m| m.precision),
        m(|m| m.recall),
        m(|m| m.f1),
        m(|m| m.accuracy),
        fixed(r.wall_time_ms),
    ]
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<Option<T>> {
    let raw = rec.get(i).unwrap_or("");
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse()
        .map(Some)
        .map_err(|_| CliError::Output(format!("bad {} value {raw:?}", CSV_COLUMNS[i])))
}

fn need<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    field(rec, i)?.ok_or_else(|| CliError::Output(format!("missing {}", CSV_COLUMNS[i])))
}

pub fn from_record(rec: &csv::StringRecord) -> Result<RunResult> {
    if rec.len() != CSV_COLUMNS.len() {
        return Err(CliError::Output(format!("expected {} columns, got {}", CSV_COLUMNS.len(), rec.len())));
    }
    let metric_values: Vec<Option<f64>> = (13..18).map(|i| field(rec, i)).collect::<Result<_>>()?;
    let metrics = match metric_values.as_slice() {
        [Some(ari), Some(precision), Some(recall), Some(f1), Some(accuracy)] => Some(Metrics {
            ari: *ari,
            precision: *precision,
            recall: *recall,
            f1: *f1,
            accuracy: *accuracy,
        }),
        [None, None, None, None, None] => None,
        _ => return Err(CliError::Output("partially missing metrics".into())),
    };
    Ok(RunResult {
        algo: need(rec, 0)?,
        weighting: field(rec, 1)?,
        score_fn: field(rec, 2)?,
        top_n: need(rec, 3)?,
        t: field(rec, 4)?,
        k: field(rec, 5)?,
        metric: field(rec, 6)?,
        sigma2: field(rec, 7)?,
        eps: field(rec, 8)?,
        min_pts: field(rec, 9)?,
        bandwidth: field(rec, 10)?,
        seed: need(rec, 11)?,
        k_found: need(rec, 12)?,
        metrics,
        wall_time_ms: need(rec, 18)?,
    })
}

pub fn write_csv<'a, W: Write>(out: W, results: impl IntoIterator<Item = &'a RunResult>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| CliError::Output(format!("cannot write csv: {e}"));
    w.write_record(CSV_COLUMNS).map_err(err)?;
    for r in results {
        w.write_record(to_record(r)).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Output(format!("cannot write csv: {e}")))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunResult>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| CliError::Output(e.to_string()))?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(CliError::Output("unexpected csv header".into()));
    }
    r.records()
        .map(|rec| from_record(&rec.map_err(|e| CliError::Output(e.to_string()))?))
        .collect()
}

pub fn to_json(outcome: &SweepOutcome) -> serde_json::Value {
    let rows: Vec<_> = outcome
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let point: serde_json::Map<String, serde_json::Value> =
                row.point.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            let (result, error) = match &row.outcome {
                Ok(r) => (json!(r), serde_json::Value::Null),
                Err(e) => (serde_json::Value::Null, json!(e)),
            };
            json!({
                "grid": point,
                "result": result,
                "error": error,
                "best": outcome.best.flags(i),
            })
        })
        .collect();
    json!({ "rows": rows })
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Line chart of ARI, F1 and accuracy against the single swept parameter.
pub fn to_svg(outcome: &SweepOutcome) -> Result<String> {
    let points: Vec<(usize, &Metrics)> = outcome
        .rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.outcome.as_ref().ok().and_then(|res| res.metrics.as_ref()).map(|m| (i, m)))
        .collect();
    if points.len() < 2 {
        return Err(CliError::Output("svg plot: need ≥ 2 points".into()));
    }
    if outcome.grid.params.len() != 1 {
        return Err(CliError::Output(format!(
            "svg plot needs exactly one swept parameter, got {}; fix all but one parameter",
            outcome.grid.params.len()
        )));
    }
    let key = &outcome.grid.params[0].key;
    let raw: Vec<&str> = points.iter().map(|(i, _)| outcome.rows[*i].point[0].1.as_str()).collect();
    let numeric: Option<Vec<f64>> = raw.iter().map(|v| v.parse::<f64>().ok()).collect();
    let xs: Vec<f64> = numeric.clone().unwrap_or_else(|| (0..raw.len()).map(|i| i as f64).collect());
    let (x0, x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
    let y0 = points.iter().map(|(_, m)| m.ari).fold(0.0f64, f64::min);
    let (y0, y1) = (y0, 1.0);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right, bottom, top) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let y = y0 + (y1 - y0) * f64::from(i) / 5.0;
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{left}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.2}</text>"##,
            left - 5.0,
            py(y),
            py(y),
            left - 8.0,
            py(y) + 4.0,
            y
        );
    }
    let ticks = 6.min(xs.len());
    for i in 0..ticks {
        let idx = i * (xs.len() - 1) / (ticks - 1).max(1);
        let label = raw[idx];
        let x = px(xs[idx]);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            bottom + 5.0,
            bottom + 20.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{key}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let series: [(&str, &str, fn(&Metrics) -> f64); 3] = [
        ("ARI", "#1f77b4", |m| m.ari),
        ("F1", "#d62728", |m| m.f1),
        ("Acc", "#2ca02c", |m| m.accuracy),
    ];
    for (n, (name, colour, get)) in series.iter().enumerate() {
        let pts: Vec<String> = points
            .iter()
            .zip(&xs)
            .map(|((_, m), &x)| format!("{:.2},{:.2}", px(x), py(get(m))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline data-series="{name}" fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = top + 15.0 * n as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            right - 70.0,
            right - 50.0,
            right - 45.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes the outcome to `path` in `format`. CSV holds the successful rows
/// only; failures and best-row flags go to JSON.
pub fn emit_results(outcome: &SweepOutcome, format: Format, path: &Path) -> Result<()> {
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, outcome.results())?;
            buf
        }
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&to_json(outcome))
                .map_err(|e| CliError::Output(e.to_string()))?;
            text.push('\n');
            text.into_bytes()
        }
        Format::Svg => to_svg(outcome)?.into_bytes(),
    };
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
