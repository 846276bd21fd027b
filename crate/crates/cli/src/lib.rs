//! Configuration, pipeline runs, parameter sweeps and result files for the
//! `segrel` command.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod sweep;

pub use config::{Algorithm, Baseline, ConfigMap, Family, PipelineConfig, Source};
pub use error::{CliError, Result};
pub use output::{emit_results, Format, CSV_COLUMNS};
pub use pipeline::{run_pipeline, Metrics, RunResult};
pub use sweep::{sweep, BestRows, Grid, GridParam, SweepOutcome, SweepRow};
