use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use segrel::output::{emit_results, Format};
use segrel::{sweep, CliError, ConfigMap, Grid, PipelineConfig, Result, SweepOutcome, SweepRow};
use segrel_core::{generate_synthetic, SyntheticSpec};

#[derive(Parser)]
#[command(name = "segrel", version, about = "Link topic segments across documents through word communities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Run(RunArgs),
    /// Run a parameter grid.
    Sweep(SweepArgs),
    /// Write a synthetic planted-topic corpus.
    Gen(GenArgs),
}

/// Flags that override config file keys.
#[derive(Args, Default)]
struct Overrides {
    /// Corpus JSON file.
    #[arg(long)]
    corpus: Option<String>,
    /// Synthetic corpus spec, e.g. "topics=5,segs=10,overlap=0.2".
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    weighting: Option<String>,
    #[arg(long)]
    score: Option<String>,
    #[arg(long = "top-n")]
    top_n: Option<String>,
    /// Walk length for walktrap.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    sigma2: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "min-pts")]
    min_pts: Option<String>,
    #[arg(long)]
    bandwidth: Option<String>,
    #[arg(long)]
    linkage: Option<String>,
    /// tfidf or counts vectors for the baselines.
    #[arg(long)]
    vectors: Option<String>,
    /// Document frequency over segments or documents.
    #[arg(long)]
    idf: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Extra key=value settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    fn apply(&self, map: &mut ConfigMap) -> Result<()> {
        let pairs = [
            ("corpus", &self.corpus),
            ("synthetic", &self.synthetic),
            ("algo", &self.algo),
            ("weighting", &self.weighting),
            ("score", &self.score),
            ("top_n", &self.top_n),
            ("t", &self.t),
            ("k", &self.k),
            ("metric", &self.metric),
            ("sigma2", &self.sigma2),
            ("eps", &self.eps),
            ("min_pts", &self.min_pts),
            ("bandwidth", &self.bandwidth),
            ("linkage", &self.linkage),
            ("vectors", &self.vectors),
            ("idf", &self.idf),
            ("seed", &self.seed),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                map.set(key, v.clone())?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set {kv:?} is not key=value")))?;
            map.set(k.trim(), v.trim())?;
        }
        Ok(())
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    /// Output file (.csv, .json); CSV on stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    /// Grid entries like "top_n=1..300" or "linkage=ward,complete"; repeat
    /// the flag or separate entries with ';'.
    #[arg(long, required = true)]
    grid: Vec<String>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Results file (.csv or .json); CSV on stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG line plot of ARI, F1 and accuracy.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 5)]
    topics: usize,
    /// Segments per topic.
    #[arg(long, default_value_t = 10)]
    segs: usize,
    /// Words per topic vocabulary.
    #[arg(long, default_value_t = 40)]
    vocab: usize,
    /// Fraction of each topic vocabulary shared by all topics.
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    /// Tokens per segment.
    #[arg(long, default_value_t = 120)]
    length: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn base_map(config: &Option<PathBuf>, overrides: &Overrides) -> Result<ConfigMap> {
    let mut map = match config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::new(),
    };
    overrides.apply(&mut map)?;
    Ok(map)
}

fn write(outcome: &SweepOutcome, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => emit_results(outcome, Format::from_path(path), path),
        None => segrel::output::write_csv(std::io::stdout().lock(), outcome.results()),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut map = base_map(&args.config, &args.overrides)?;
    let (config, warnings) = PipelineConfig::from_map(&map)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let out = args.out.or(config.out.clone());
    if let Some(path) = &out {
        map.set("out", path.display().to_string())?;
    }
    let result = segrel::run_pipeline(&config)?;
    let outcome = SweepOutcome {
        grid: Grid::default(),
        rows: vec![SweepRow { point: Vec::new(), config: map, warnings, outcome: Ok(result) }],
        best: Default::default(),
    };
    write(&outcome, out.as_ref())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let map = base_map(&args.config, &args.overrides)?;
    let grid = Grid::parse(&args.grid)?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let outcome = sweep(&map, &grid, jobs)?;

    let mut seen = std::collections::BTreeSet::new();
    for w in outcome.rows.iter().flat_map(|r| &r.warnings) {
        if seen.insert(w) {
            eprintln!("warning: {w}");
        }
    }
    for (i, e) in outcome.failures() {
        eprintln!("row {i} failed: {e}");
    }
    for (name, row) in [
        ("ari", outcome.best.ari),
        ("f1", outcome.best.f1),
        ("accuracy", outcome.best.accuracy),
    ] {
        if let Some(row) = row {
            let point: Vec<String> = outcome.rows[row].point.iter().map(|(k, v)| format!("{k}={v}")).collect();
            eprintln!("best {name}: row {row} ({})", point.join(", "));
        }
    }
    if outcome.results().next().is_none() {
        let first = outcome.rows.first().and_then(|r| r.outcome.as_ref().err()).cloned();
        return Err(CliError::Config(first.unwrap_or_else(|| "empty grid".into())));
    }
    write(&outcome, args.out.as_ref())?;
    if let Some(plot) = &args.plot {
        emit_results(&outcome, Format::Svg, plot)?;
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let spec = SyntheticSpec {
        num_topics: args.topics,
        segments_per_topic: args.segs,
        vocab_per_topic: args.vocab,
        overlap_fraction: args.overlap,
        segment_length: args.length,
        seed: args.seed,
    };
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    generate_synthetic(&spec)?.save(&args.out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
