//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p segrel --test acceptance`. Exits non-zero when any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segrel::output::{read_csv, to_record};
use segrel::{run_pipeline, sweep, ConfigMap, Grid, PipelineConfig, RunResult};
use segrel_core::baselines::{
    agglomerative, dbscan, jacobi_eigen, kmeans, meanshift, nmf, normalized_laplacian, similarity,
    spectral, Linkage, Metric, SegmentMatrix, SimilarityMatrix,
};
use segrel_core::community::{cnm, cnm_observed, louvain, louvain_observed, transition_matrix, walktrap};
use segrel_core::eval::{accuracy, ari, pairwise_f1};
use segrel_core::{modularity, CoGraph, Partition};
use segrel_oracles::{
    brute_accuracy, brute_modularity_best, brute_pair_metrics, pairwise_modularity, OracleBudget,
};

// tolerances
const METRIC_TOL: f64 = 1e-9;
const MODULARITY_TOL: f64 = 1e-9;
const OPTIMUM_GAP: f64 = 0.05;
const OPTIMUM_MIN_HITS: usize = 45;
const HISTORY_REL_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-8;
const ROW_SUM_TOL: f64 = 1e-12;
const DEGRADATION_MIN_DROP: f64 = 0.15;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_labels(r: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| r.random_range(0..k)).collect()
}

/// Weighted graph on `n` nodes with at least one edge.
fn random_edges(r: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize, f64)> {
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if r.random_bool(p) {
                    edges.push((a, b, r.random_range(0.5..3.0)));
                }
            }
        }
        if !edges.is_empty() {
            return edges;
        }
    }
}

fn graph(n: usize, edges: &[(usize, usize, f64)]) -> CoGraph {
    CoGraph::with_nodes(n, edges.iter().copied()).expect("valid graph")
}

fn config(text: &str) -> PipelineConfig {
    PipelineConfig::from_map(&ConfigMap::parse_str(text).expect("config parses"))
        .expect("config valid")
        .0
}

fn row_without_timing(r: &RunResult) -> Vec<String> {
    let mut rec = to_record(r);
    rec.pop();
    rec
}

fn metric_oracles() -> Check {
    let mut r = rng(1);
    let budget = OracleBudget::default();
    for case in 0..200 {
        let n = r.random_range(1..=10);
        let (ka, kb) = (r.random_range(1..=5), r.random_range(1..=5));
        let (a, b) = (random_labels(&mut r, n, ka), random_labels(&mut r, n, kb));
        let (pa, pb) = (Partition::from_labels(a.clone()), Partition::from_labels(b.clone()));
        let o = brute_pair_metrics(&a, &b, budget).map_err(|e| e.to_string())?;
        let got = ari(&pa, &pb).map_err(|e| e.to_string())?;
        ensure((got - o.ari).abs() <= METRIC_TOL, || format!("case {case}: ari {got} vs {}", o.ari))?;
        let s = pairwise_f1(&pa, &pb).map_err(|e| e.to_string())?;
        for (name, x, y) in [
            ("precision", s.precision, o.precision),
            ("recall", s.recall, o.recall),
            ("f1", s.f1, o.f1),
        ] {
            ensure((x - y).abs() <= METRIC_TOL, || format!("case {case}: {name} {x} vs {y}"))?;
        }
        let acc = accuracy(&pa, &pb).map_err(|e| e.to_string())?;
        let expected = brute_accuracy(&a, &b, budget).map_err(|e| e.to_string())?;
        ensure(acc == expected, || format!("case {case}: accuracy {acc} vs {expected}"))?;
    }
    Ok(format!("200 pairs agree (tol {METRIC_TOL:e}, accuracy exact)"))
}

fn modularity_oracle() -> Check {
    let mut r = rng(2);
    let (mut cnm_hits, mut louvain_hits) = (0, 0);
    for case in 0..50u64 {
        let n = r.random_range(2..=10);
        let edges = random_edges(&mut r, n, 0.45);
        let g = graph(n, &edges);
        let (best, _) = brute_modularity_best(n, &edges, OracleBudget::default()).map_err(|e| e.to_string())?;
        let random = Partition::from_labels(random_labels(&mut r, n, 3));
        let pc = cnm(&g).map_err(|e| e.to_string())?;
        let pl = louvain(&g, case).map_err(|e| e.to_string())?;
        for p in [&random, &pc, &pl] {
            let q = modularity(&g, p).map_err(|e| e.to_string())?;
            let o = pairwise_modularity(n, &edges, p.labels());
            ensure((q - o).abs() <= MODULARITY_TOL, || format!("graph {case}: Q {q} vs pairwise {o}"))?;
        }
        let qc = modularity(&g, &pc).map_err(|e| e.to_string())?;
        let ql = modularity(&g, &pl).map_err(|e| e.to_string())?;
        ensure(qc <= best + MODULARITY_TOL && ql <= best + MODULARITY_TOL, || {
            format!("graph {case}: Q above the exhaustive optimum")
        })?;
        cnm_hits += usize::from(best - qc <= OPTIMUM_GAP);
        louvain_hits += usize::from(best - ql <= OPTIMUM_GAP);
    }
    ensure(cnm_hits >= OPTIMUM_MIN_HITS && louvain_hits >= OPTIMUM_MIN_HITS, || {
        format!("within {OPTIMUM_GAP} of optimum: cnm {cnm_hits}/50, louvain {louvain_hits}/50")
    })?;
    Ok(format!(
        "Q matches pairwise sum on 50 graphs; within {OPTIMUM_GAP} of optimum: cnm {cnm_hits}/50, louvain {louvain_hits}/50"
    ))
}

fn monotonicity() -> Check {
    let mut r = rng(3);
    let (mut merges, mut moves) = (0, 0);
    for case in 0..20u64 {
        let n = r.random_range(5..=30);
        let g = graph(n, &random_edges(&mut r, n, 0.25));
        for louvain_run in [false, true] {
            let mut prev = modularity(&g, &Partition::singletons(n)).map_err(|e| e.to_string())?;
            let mut failure = None;
            let mut steps = 0;
            let mut observe = |labels: &[usize]| {
                let q = modularity(&g, &Partition::from_labels(labels.to_vec())).expect("labels fit");
                if q <= prev && failure.is_none() {
                    failure = Some(format!("graph {case}: Q {prev} -> {q}"));
                }
                prev = q;
                steps += 1;
            };
            if louvain_run {
                louvain_observed(&g, case, &mut observe).map_err(|e| e.to_string())?;
            } else {
                cnm_observed(&g, &mut observe).map_err(|e| e.to_string())?;
            }
            if let Some(f) = failure {
                return Err(format!("{}: {f}", if louvain_run { "louvain" } else { "cnm" }));
            }
            if louvain_run {
                moves += steps;
            } else {
                merges += steps;
            }
        }
    }
    let non_increasing = |h: &[f64]| h.windows(2).all(|w| w[1] <= w[0] * (1.0 + HISTORY_REL_TOL));
    for case in 0..20u64 {
        let (rows, cols) = (r.random_range(8..=30), r.random_range(3..=8));
        let m = Array2::from_shape_fn((rows, cols), |_| r.random_range(0.0..10.0));
        let k = r.random_range(2..=cols.min(5));
        let km = kmeans(&m, k, case).map_err(|e| e.to_string())?;
        ensure(non_increasing(&km.objective_history), || {
            format!("matrix {case}: k-means objective {:?}", km.objective_history)
        })?;
        let nf = nmf(&m, k, case).map_err(|e| e.to_string())?;
        ensure(non_increasing(&nf.error_history), || {
            format!("matrix {case}: nmf error {:?}", nf.error_history)
        })?;
    }
    Ok(format!(
        "{merges} cnm merges and {moves} louvain moves all raise Q; k-means and nmf histories non-increasing on 20 matrices"
    ))
}

fn planted_recovery() -> Check {
    let base = "synthetic = topics=5,segs=10,vocab=40,overlap=0.0,length=120,seed=42\nweighting = count\nscore = score_c\ntop_n = 100\n";
    let mut found = Vec::new();
    for algo in ["lp", "cnm", "louvain", "walktrap\nt = 4"] {
        let res = run_pipeline(&config(&format!("{base}algo = {algo}\n"))).map_err(|e| e.to_string())?;
        let m = res.metrics.ok_or("no metrics")?;
        ensure(m.ari == 1.0 && m.f1 == 1.0 && m.accuracy == 1.0, || {
            format!("{}: ari {} f1 {} acc {}", res.algo, m.ari, m.f1, m.accuracy)
        })?;
        found.push(format!("{} k={}", res.algo, res.k_found));
    }
    Ok(format!("ARI = F1 = Acc = 1 for {}", found.join(", ")))
}

fn degradation() -> Check {
    let overlaps = [0.0, 0.2, 0.4, 0.6, 0.8];
    let mut means = Vec::new();
    for o in overlaps {
        let mut total = 0.0;
        for seed in 0..10 {
            let c = config(&format!(
                "synthetic = topics=5,segs=10,vocab=40,length=120\noverlap = {o}\ncorpus_seed = {seed}\nseed = {seed}\nalgo = louvain\nweighting = count\nscore = score_c\ntop_n = 100\n"
            ));
            total += run_pipeline(&c).map_err(|e| e.to_string())?.metrics.ok_or("no metrics")?.ari;
        }
        means.push(total / 10.0);
    }
    let shown: Vec<String> = overlaps.iter().zip(&means).map(|(o, m)| format!("{o}:{m:.4}")).collect();
    ensure(means.windows(2).all(|w| w[1] <= w[0]), || format!("mean ARI not non-increasing: {}", shown.join(" ")))?;
    let drop = means[0] - means[4];
    ensure(drop >= DEGRADATION_MIN_DROP, || format!("drop {drop:.4} < {DEGRADATION_MIN_DROP}: {}", shown.join(" ")))?;
    Ok(format!("mean ARI by overlap {}; drop {drop:.4}", shown.join(" ")))
}

fn blobs(per: usize, seed: u64) -> (Array2<f64>, Partition) {
    let mut r = rng(seed);
    let mut data = Array2::zeros((2 * per, 2));
    for i in 0..2 * per {
        let (cx, cy) = if i < per { (8.0, 1.0) } else { (1.0, 8.0) };
        data[[i, 0]] = cx + r.random_range(-0.5..0.5);
        data[[i, 1]] = cy + r.random_range(-0.5..0.5);
    }
    (data, Partition::from_labels((0..2 * per).map(|i| usize::from(i >= per))))
}

fn baselines() -> Check {
    let (pts, truth) = blobs(20, 6);
    let m = SegmentMatrix::new(pts.clone()).map_err(|e| e.to_string())?;
    let euclid = similarity(&m, Metric::Euclidean).map_err(|e| e.to_string())?;
    let gauss = similarity(&m, Metric::Gaussian { sigma2: 2.0 }).map_err(|e| e.to_string())?;
    let runs: Vec<(&str, Partition)> = vec![
        ("kmeans", kmeans(&pts, 2, 1).map_err(|e| e.to_string())?.partition),
        ("agglomerative", agglomerative(&euclid, Linkage::Complete, 2).map_err(|e| e.to_string())?),
        ("dbscan", dbscan(&euclid, 1.5, 3).map_err(|e| e.to_string())?.partition),
        ("meanshift", meanshift(&pts, 1.5).map_err(|e| e.to_string())?),
        ("spectral", spectral(&gauss, 2, 1).map_err(|e| e.to_string())?),
        ("nmf", nmf(&pts, 2, 1).map_err(|e| e.to_string())?.partition),
    ];
    for (name, p) in &runs {
        let acc = accuracy(p, &truth).map_err(|e| e.to_string())?;
        ensure(acc == 1.0, || format!("{name}: accuracy {acc}"))?;
    }
    Ok("kmeans, agglomerative, dbscan, meanshift, spectral and nmf reach Acc = 1 on two blobs".into())
}

fn spectral_structure() -> Check {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for case in 0..30 {
        let (n, d) = (r.random_range(3..=15), r.random_range(2..=6));
        // sparse nonnegative vectors, so some pairs are orthogonal
        let data = Array2::from_shape_fn((n, d), |_| if r.random_bool(0.5) { r.random_range(0.0..5.0) } else { 0.0 });
        let m = SegmentMatrix::new(data).map_err(|e| e.to_string())?;
        let metric = match case % 3 {
            0 => Metric::Cosine,
            1 => Metric::Euclidean,
            _ => Metric::Gaussian { sigma2: r.random_range(0.5..10.0) },
        };
        let sim = similarity(&m, metric).map_err(|e| e.to_string())?;
        let eig = jacobi_eigen(&normalized_laplacian(&sim.affinities())).map_err(|e| e.to_string())?;
        let lmin = eig.values[0];
        ensure(lmin > -EIGEN_TOL && lmin.abs() < EIGEN_TOL, || format!("case {case}: lambda_min {lmin:e}"))?;
        worst = worst.max(lmin.abs());
    }
    for (case, sizes) in [vec![3, 4], vec![5, 2, 4], vec![3, 3, 3, 3], vec![6, 1, 2]].iter().enumerate() {
        let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
        let n = labels.len();
        let values = Array2::from_shape_fn((n, n), |(i, j)| f64::from(labels[i] == labels[j]));
        let sim = SimilarityMatrix::from_values(values, Metric::Cosine).map_err(|e| e.to_string())?;
        let p = spectral(&sim, sizes.len(), case as u64).map_err(|e| e.to_string())?;
        let score = ari(&p, &Partition::from_labels(labels)).map_err(|e| e.to_string())?;
        ensure(score == 1.0, || format!("blocks {sizes:?}: ARI {score}"))?;
    }
    Ok(format!("|lambda_min| <= {worst:.1e} on 30 matrices; 4 block-diagonal matrices recovered"))
}

fn determinism() -> Check {
    let configs = [
        "synthetic = overlap=0.4\nalgo = louvain\nweighting = count\nscore = score_c\nseed = 5\n",
        "synthetic = overlap=0.4\nalgo = lp\nweighting = best_tfidf\nscore = score_tfidf\nseed = 9\n",
        "synthetic = overlap=0.4\nalgo = walktrap\nt = 3\nweighting = count+avg-tfidf\nscore = score_seg\n",
        "synthetic = overlap=0.4\nalgo = kmeans\nk = 5\nseed = 2\n",
        "synthetic = overlap=0.4\nalgo = spectral\nk = 5\nmetric = cosine\nseed = 2\n",
        "synthetic = overlap=0.4\nalgo = nmf\nk = 5\nseed = 2\n",
    ];
    for text in configs {
        let c = config(text);
        let a = run_pipeline(&c).map_err(|e| e.to_string())?;
        let b = run_pipeline(&c).map_err(|e| e.to_string())?;
        ensure(row_without_timing(&a) == row_without_timing(&b), || format!("{} rows differ", a.algo))?;
    }
    let base = ConfigMap::parse_str("synthetic = overlap=0.5\nalgo = louvain\nweighting = count\nscore = score_c\n")
        .map_err(|e| e.to_string())?;
    let grid = Grid::parse(&["top_n=5..40:5; seed=1,2,3"]).map_err(|e| e.to_string())?;
    let rows = |jobs| -> Result<Vec<Vec<String>>, String> {
        let out = sweep(&base, &grid, jobs).map_err(|e| e.to_string())?;
        ensure(out.failures().count() == 0, || "sweep rows failed".into())?;
        Ok(out.results().map(row_without_timing).collect())
    };
    let (one, eight) = (rows(1)?, rows(8)?);
    ensure(one == eight, || "jobs 1 and jobs 8 differ".into())?;
    Ok(format!("{} configs repeat exactly; {}-row sweep identical for jobs 1 and 8", configs.len(), one.len()))
}

fn sweep_shape() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (csv, svg) = (dir.path().join("sweep.csv"), dir.path().join("sweep.svg"));
    let status = Command::new(env!("CARGO_BIN_EXE_segrel"))
        .args([
            "sweep",
            "--synthetic",
            "topics=5,segs=10,vocab=40,overlap=0.2,length=120,seed=42",
            "--algo",
            "louvain",
            "--weighting",
            "count",
            "--score",
            "score_c",
            "--grid",
            "top_n=1..300",
            "--out",
        ])
        .arg(&csv)
        .arg("--plot")
        .arg(&svg)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        format!("segrel sweep failed: {}", String::from_utf8_lossy(&status.stderr))
    })?;
    let rows = read_csv(std::fs::File::open(&csv).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(rows.len() == 300, || format!("{} csv rows", rows.len()))?;
    ensure(rows.iter().enumerate().all(|(i, r)| r.top_n == i + 1), || "rows out of grid order".into())?;
    let text = std::fs::read_to_string(&svg).map_err(|e| e.to_string())?;
    let lines: Vec<usize> = text
        .split("<polyline")
        .skip(1)
        .map(|p| p.split("points=\"").nth(1).unwrap_or("").split('"').next().unwrap_or("").split_whitespace().count())
        .collect();
    ensure(lines == [300, 300, 300], || format!("polyline point counts {lines:?}"))?;
    Ok("300-row csv and svg with 3 polylines of 300 points".into())
}

fn walktrap_invariants() -> Check {
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = r.random_range(2..=30);
        let g = graph(n, &random_edges(&mut r, n, 0.2));
        let p = transition_matrix(&g);
        for (i, row) in p.rows().into_iter().enumerate() {
            let dev = (row.sum() - 1.0).abs();
            ensure(dev <= ROW_SUM_TOL, || format!("row {i} sums to 1 {dev:+e}"))?;
            worst = worst.max(dev);
        }
    }
    let mut edges = Vec::new();
    for base in [0, 5] {
        for a in base..base + 5 {
            for b in a + 1..base + 5 {
                edges.push((a, b, 1.0));
            }
        }
    }
    let g = graph(10, &edges);
    for t in [1, 5, 50] {
        let p = walktrap(&g, t).map_err(|e| e.to_string())?;
        ensure(p.k() == 2, || format!("t = {t}: {} communities", p.k()))?;
    }
    Ok(format!("max |row sum - 1| = {worst:.1e} on 20 graphs; two cliques give 2 communities for t = 1, 5, 50"))
}

fn main() {
    let criteria: [(&str, Option<u64>, fn() -> Check); 10] = [
        ("metric oracle equivalence", Some(10), metric_oracles),
        ("modularity oracle", Some(60), modularity_oracle),
        ("monotonicity instrumentation", None, monotonicity),
        ("planted-topic recovery", Some(5), planted_recovery),
        ("degradation trend", Some(120), degradation),
        ("baseline sanity", Some(10), baselines),
        ("spectral structure", None, spectral_structure),
        ("determinism", None, determinism),
        ("sweep shape", Some(300), sweep_shape),
        ("walktrap stochastic matrix", None, walktrap_invariants),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > Duration::from_secs(*l) => {
                Err(format!("took {:.2} s, limit {l} s", elapsed.as_secs_f64()))
            }
            (o, _) => o,
        };
        let timing = match limit {
            Some(l) => format!("{:.2} s, limit {l} s", elapsed.as_secs_f64()),
            None => format!("{:.2} s", elapsed.as_secs_f64()),
        };
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({timing})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail} ({timing})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
