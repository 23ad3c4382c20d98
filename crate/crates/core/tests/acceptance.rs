//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every tolerance and protocol constant is pinned below.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use attrcrf::bench::{bench_inference, bench_predict, default_pair_counts};
use attrcrf::check::{gradient_check, tree_exactness, uniform_pairwise_invariance, Fault};
use attrcrf::trainer::{
    fit_and_evaluate, generate_synthetic, Dataset, Init, ModelKind, Split, SyntheticConfig, TrainConfig,
};
use attrcrf::{FactorGraph, GraphPolicy, InferenceConfig, Sharing};

// 1
const TREE_COUNT: usize = 20;
const TREE_MAX_VARS: usize = 10;
const TREE_TOL: f64 = 1e-9;
const TREE_BUDGET: Duration = Duration::from_secs(10);
// 2
const GRAD_CONFIGS: usize = 10;
const GRAD_REL_TOL: f64 = 1e-4;
const GRAD_BUDGET: Duration = Duration::from_secs(30);
// 3
const INVARIANCE_CASES: usize = 50;
const INVARIANCE_TOL: f64 = 1e-12;
// 4, 5, 6
const SEEDS: u64 = 5;
const MIN_K: usize = 2;
const BASE_T: usize = 2;
const DEEP_T: usize = 8;
const EPOCHS: usize = 40;
const LINEAR_OVER_SIGMOID: f64 = 0.02;
const STRUCTURED_BUDGET: Duration = Duration::from_secs(600);
const POLICY_MARGIN: f64 = 0.005;
const DEPTH_MARGIN: f64 = 0.01;
const SHARING_MARGIN: f64 = 0.01;
// 7
const BENCH_VARS: usize = 102;
const BENCH_REPS: usize = 7;
const BENCH_INNER: usize = 50;
const BENCH_JITTER: f64 = 0.10;
const PREDICT_FACTORS: usize = 700;
const PREDICT_DIM: usize = 512;
const PREDICT_BUDGET_S: f64 = 0.01;

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: usize, name: &str, o: &Outcome) {
    println!(
        "criterion {id} [{}] {name}: {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail
    );
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = tree_exactness(TREE_COUNT, TREE_MAX_VARS, 2024).expect("tree check runs");
    let elapsed = start.elapsed();
    Outcome {
        passed: r.max_error < TREE_TOL && elapsed < TREE_BUDGET,
        detail: format!(
            "{} trees, max |bp - exact| = {:.2e} (< {TREE_TOL:.0e}), {:.2}s (< {}s)",
            r.cases,
            r.max_error,
            elapsed.as_secs_f64(),
            TREE_BUDGET.as_secs()
        ),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let r = gradient_check(GRAD_CONFIGS, 2024, Fault::None).expect("gradient check runs");
    let elapsed = start.elapsed();
    Outcome {
        passed: r.max_error < GRAD_REL_TOL && elapsed < GRAD_BUDGET,
        detail: format!(
            "{} configs (N=5, D=8, T=2, linear_crf), max relative error {:.2e} (< {GRAD_REL_TOL:.0e}; discrepancies <= 1e-8 count as 0, \
             largest absolute {:.1e}), {:.2}s (< {}s)",
            r.cases,
            r.max_error,
            r.max_abs_error,
            elapsed.as_secs_f64(),
            GRAD_BUDGET.as_secs()
        ),
    }
}

fn criterion_3() -> Outcome {
    let r = uniform_pairwise_invariance(INVARIANCE_CASES, 2024).expect("invariance check runs");
    Outcome {
        passed: r.max_error < INVARIANCE_TOL,
        detail: format!(
            "{} graphs, max |constant-pairwise - unary-only| = {:.2e} (< {INVARIANCE_TOL:.0e})",
            r.cases, r.max_error
        ),
    }
}

/// Test macro-F1 of every run needed by criteria 4 to 6, per seed.
#[derive(Default)]
struct Grid {
    sigmoid: Vec<f64>,
    const_crf: Vec<f64>,
    linear: Vec<f64>,
    top: Vec<f64>,
    shared_deep: Vec<f64>,
    independent: Vec<f64>,
    independent_deep: Vec<f64>,
    structured_time: Duration,
}

fn fit(kind: ModelKind, data: &Dataset, graph: &Arc<FactorGraph>, t: usize, sharing: Sharing, seed: u64) -> f64 {
    let cfg = TrainConfig { epochs: EPOCHS, seed, ..Default::default() };
    let (_, _, report) = fit_and_evaluate(
        kind,
        data,
        kind.is_crf().then(|| graph.clone()),
        InferenceConfig::new(t, sharing),
        Init::Uniform { seed },
        &cfg,
    )
    .expect("training succeeds");
    report.avg_f1
}

fn run_grid() -> Grid {
    let mut g = Grid::default();
    for seed in 0..SEEDS {
        let start = Instant::now();
        let synth = generate_synthetic(&SyntheticConfig {
            n_attrs: 12,
            dim: 16,
            n_samples: 6000,
            seed,
            ..Default::default()
        })
        .expect("synthetic data");
        let data = &synth.dataset;
        let labels = data.split_labels(Split::Train);
        let min = Arc::new(GraphPolicy::Min { k: MIN_K }.build(&labels).expect("min graph"));
        g.sigmoid.push(fit(ModelKind::Sigmoid, data, &min, BASE_T, Sharing::Shared, seed));
        g.const_crf.push(fit(ModelKind::ConstCrf, data, &min, BASE_T, Sharing::Shared, seed));
        g.linear.push(fit(ModelKind::LinearCrf, data, &min, BASE_T, Sharing::Shared, seed));
        g.structured_time += start.elapsed();

        let top = Arc::new(
            GraphPolicy::Top { n_pairs: min.n_pairwise() }
                .build(&labels)
                .expect("top graph"),
        );
        g.top.push(fit(ModelKind::LinearCrf, data, &top, BASE_T, Sharing::Shared, seed));
        g.shared_deep.push(fit(ModelKind::LinearCrf, data, &min, DEEP_T, Sharing::Shared, seed));
        g.independent.push(fit(ModelKind::LinearCrf, data, &min, BASE_T, Sharing::Independent, seed));
        g.independent_deep.push(fit(ModelKind::LinearCrf, data, &min, DEEP_T, Sharing::Independent, seed));
    }
    g
}

fn criterion_4(g: &Grid) -> Outcome {
    let (s, c, l) = (mean(&g.sigmoid), mean(&g.const_crf), mean(&g.linear));
    Outcome {
        passed: l - s >= LINEAR_OVER_SIGMOID && l >= c && g.structured_time < STRUCTURED_BUDGET,
        detail: format!(
            "mean test macro-F1 over {SEEDS} seeds: linear_crf {l:.4}, const_crf {c:.4}, sigmoid {s:.4}; \
             linear - sigmoid = {:.4} (>= {LINEAR_OVER_SIGMOID}), linear >= const: {}; {:.0}s (< {}s)",
            l - s,
            l >= c,
            g.structured_time.as_secs_f64(),
            STRUCTURED_BUDGET.as_secs()
        ),
    }
}

fn criterion_5(g: &Grid) -> Outcome {
    let (m, t) = (mean(&g.linear), mean(&g.top));
    Outcome {
        passed: m >= t - POLICY_MARGIN,
        detail: format!(
            "mean macro-F1 min(K={MIN_K}) {m:.4} vs top (same pair count) {t:.4}; difference {:+.4} (>= -{POLICY_MARGIN})",
            m - t
        ),
    }
}

fn criterion_6(g: &Grid) -> Outcome {
    let (s2, s8) = (mean(&g.linear), mean(&g.shared_deep));
    let (i2, i8) = (mean(&g.independent), mean(&g.independent_deep));
    let depth_ok = s8 <= s2 + DEPTH_MARGIN;
    let sharing_ok = i2 >= s2 - SHARING_MARGIN && i8 >= s8 - SHARING_MARGIN;
    Outcome {
        passed: depth_ok && sharing_ok,
        detail: format!(
            "shared T={BASE_T} {s2:.4}, T={DEEP_T} {s8:.4} (gain {:+.4} <= {DEPTH_MARGIN}); \
             independent T={BASE_T} {i2:.4} ({:+.4}), T={DEEP_T} {i8:.4} ({:+.4}) vs shared (>= -{SHARING_MARGIN})",
            s8 - s2,
            i2 - s2,
            i8 - s8
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut counts = vec![0];
    counts.extend(default_pair_counts());
    let rows = bench_inference(BENCH_VARS, &counts, BASE_T, BENCH_REPS, BENCH_INNER, 0).expect("bench runs");
    let mut monotone = true;
    let mut running_max: f64 = 0.0;
    for r in &rows {
        monotone &= r.seconds >= (1.0 - BENCH_JITTER) * running_max;
        running_max = running_max.max(r.seconds);
    }
    let per_sample = bench_predict(
        BENCH_VARS,
        PREDICT_FACTORS - BENCH_VARS,
        PREDICT_DIM,
        BASE_T,
        BENCH_REPS,
        0,
    )
    .expect("predict bench runs");
    let timings: Vec<String> = rows.iter().map(|r| format!("{}:{:.1e}", r.n_pairwise, r.seconds)).collect();
    Outcome {
        passed: monotone && per_sample < PREDICT_BUDGET_S,
        detail: format!(
            "median inference seconds by pair count [{}], nondecreasing within {:.0}%: {monotone}; \
             per-sample prediction ({BENCH_VARS} attributes, {PREDICT_FACTORS} factors, D={PREDICT_DIM}) {per_sample:.2e}s (< {PREDICT_BUDGET_S}s)",
            timings.join(" "),
            BENCH_JITTER * 100.0
        ),
    }
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_attrcrf"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

/// Stdout plus every written file of one gen/build/train/eval pipeline.
fn pipeline(dir: &Path, threads: &str) -> Vec<Vec<u8>> {
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let data = dir.join("data");
    let graph = dir.join("graph.json");
    let ck = dir.join("ck.json");
    let hist = dir.join("history.csv");
    let marg = dir.join("marginals.csv");
    let mut outputs = vec![
        cli(&["gen-data", "--out", &s(&data), "--n-samples", "600", "--seed", "11"]),
        cli(&["build-graph", "--data", &s(&data), "--policy", "min", "--param", "2", "--out", &s(&graph)]),
        cli(&[
            "--threads", threads, "train", "--data", &s(&data), "--model", "linear_crf", "--graph", &s(&graph),
            "--epochs", "3", "--seed", "11", "--out", &s(&ck), "--history", &s(&hist),
        ]),
        cli(&[
            "--threads", threads, "eval", "--data", &s(&data), "--checkpoint", &s(&ck), "--graph", &s(&graph),
            "--marginals", &s(&marg),
        ]),
    ];
    for f in [
        data.join("features.csv"),
        data.join("labels.csv"),
        data.join("split.csv"),
        data.join("truth_graph.json"),
        graph,
        ck,
        hist,
        marg,
    ] {
        outputs.push(std::fs::read(f).expect("output file"));
    }
    outputs
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().expect("tempdir");
    let a = pipeline(&tmp.path().join("a"), "1");
    let b = pipeline(&tmp.path().join("b"), "1");
    let c = pipeline(&tmp.path().join("c"), "4");
    // stdout of gen-data and build-graph carries no paths; all else must match
    let same = a == b && a == c;
    Outcome {
        passed: same,
        detail: format!(
            "gen-data/build-graph/train/eval repeated 3x (1 and 4 threads): {} artefacts byte-identical: {same}",
            a.len()
        ),
    }
}

fn main() {
    let mut all = true;
    let mut run = |id: usize, name: &str, o: Outcome| {
        report(id, name, &o);
        all &= o.passed;
    };
    run(1, "tree exactness", criterion_1());
    run(2, "gradient exactness", criterion_2());
    run(3, "uniform-pairwise invariance", criterion_3());
    run(8, "determinism", criterion_8());
    run(7, "runtime scaling", criterion_7());
    let grid = run_grid();
    run(4, "structured-inference benefit", criterion_4(&grid));
    run(5, "graph-policy trend", criterion_5(&grid));
    run(6, "propagation depth and sharing", criterion_6(&grid));
    if !all {
        std::process::exit(1);
    }
}
