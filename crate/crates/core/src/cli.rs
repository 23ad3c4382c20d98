//! Command-line front end: `gen-data`, `build-graph`, `train`, `eval`,
//! `check` and `bench`.
//!
//! Machine-readable results go to stdout as JSON lines, human summaries to
//! stderr. Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bench::{bench_inference, bench_predict, default_pair_counts};
use crate::check::{self, Fault};
use crate::error::{Error, Result};
use crate::graph::{FactorGraph, GraphPolicy};
use crate::inference::{InferenceConfig, Sharing};
use crate::matrix::LabelMatrix;
use crate::trainer::{
    evaluate, generate_synthetic, predict_split, read_labels, train, write_marginals_csv, Checkpoint, Dataset,
    Init, Model, ModelKind, OptimizerConfig, Split, SyntheticConfig, TrainConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Divergence { .. } | Error::NonFinite(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Settings shared by `train` and `eval`, loadable from a JSON file.
/// Command-line flags override file values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub synthetic: SyntheticConfig,
    /// Directory holding `features.csv`, `labels.csv` and `split.csv`.
    pub data_dir: Option<PathBuf>,
    pub graph_file: Option<PathBuf>,
    /// Builds the graph from the training labels when no graph file is given.
    pub graph: Option<GraphPolicy>,
    pub model: ModelKind,
    pub inference: InferenceConfig,
    pub train: TrainConfig,
    pub hidden_dim: Option<usize>,
    /// Start from all-zero parameters instead of the seeded uniform draw.
    pub zero_init: bool,
    pub checkpoint: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses a config file and checks that every file it names exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for p in [&cfg.data_dir, &cfg.graph_file, &cfg.checkpoint].into_iter().flatten() {
            if !p.exists() {
                return Err(Error::Config(format!(
                    "{} references missing path {}",
                    path.display(),
                    p.display()
                )));
            }
        }
        Ok(cfg)
    }

    fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

#[derive(Debug, Parser)]
#[command(name = "attrcrf", version, about = "Trainable CRFs over attribute graphs")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset from a random ground-truth MRF.
    GenData(GenDataArgs),
    /// Build an attribute graph from label correlations.
    BuildGraph(BuildGraphArgs),
    /// Train a model and write a checkpoint.
    Train(TrainArgs),
    /// Evaluate a checkpoint (or a zero-initialised model) on a split.
    Eval(EvalArgs),
    /// Check inference and gradients against the oracles.
    Check(CheckArgs),
    /// Time inference against the number of pairwise factors.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// JSON config; its `synthetic` section is used.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n_attrs: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub coupling: Option<f64>,
    #[arg(long)]
    pub coupling_spread: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub n_hidden: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyName {
    Min,
    Rand,
    Top,
}

#[derive(Debug, Args)]
pub struct BuildGraphArgs {
    /// Labels CSV (M rows of 0/1).
    #[arg(long, conflicts_with = "data")]
    pub labels: Option<PathBuf>,
    /// Split file restricting `--labels` to its training rows.
    #[arg(long, requires = "labels")]
    pub split: Option<PathBuf>,
    /// Dataset directory; its training rows are used.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub policy: PolicyName,
    /// K for `min`, number of pairs for `rand` and `top`.
    #[arg(long)]
    pub param: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// lr 0.1, momentum 1e-4.
    Paper,
    /// lr 0.1, momentum 0.9, weight decay 1e-4.
    PaperWd,
}

/// Model and inference flags shared by `train` and `eval`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset directory from `gen-data`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_parser = parse_model_kind)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, value_parser = parse_sharing)]
    pub sharing: Option<Sharing>,
    #[arg(long)]
    pub hidden_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub zero_init: bool,
    /// Checkpoint path.
    #[arg(long)]
    pub out: PathBuf,
    /// Training history CSV.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, conflicts_with = "zero_init")]
    pub checkpoint: Option<PathBuf>,
    /// Evaluate an untrained all-zero model of `--model`.
    #[arg(long)]
    pub zero_init: bool,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    pub split: Split,
    /// Writes the per-sample marginals of the split as CSV.
    #[arg(long)]
    pub marginals: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultName {
    None,
    GradientSign,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub trees: usize,
    #[arg(long, default_value_t = 10)]
    pub max_vars: usize,
    #[arg(long, default_value_t = 20)]
    pub invariance_cases: usize,
    #[arg(long, default_value_t = 10)]
    pub gradient_configs: usize,
    /// Test hook: corrupt the analytic gradient before comparing.
    #[arg(long, value_enum, default_value = "none", hide = true)]
    pub inject_fault: FaultName,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 102)]
    pub n_attrs: usize,
    /// Comma-separated pairwise-factor counts (default 100,200,...,900).
    #[arg(long, value_delimiter = ',')]
    pub pairs: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2)]
    pub iterations: usize,
    #[arg(long, default_value_t = 7)]
    pub reps: usize,
    /// Calls per timed repetition.
    #[arg(long, default_value_t = 50)]
    pub inner: usize,
    /// Feature dimension for the end-to-end prediction timing.
    #[arg(long, default_value_t = 512)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV of `n_pairwise_factors,n_factors,iterations,median_seconds`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_model_kind(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|e| e.to_string())
}

fn parse_sharing(s: &str) -> std::result::Result<Sharing, String> {
    s.parse::<Sharing>().map_err(|e| e.to_string())
}

fn parse_split(s: &str) -> std::result::Result<Split, String> {
    s.parse::<Split>().map_err(|e| e.to_string())
}

/// Streams for command output.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

fn emit(w: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(w, "{value}").map_err(|e| Error::io(Path::new("<stdout>"), e))
}

fn note(w: &mut dyn Write, msg: &str) {
    let _ = writeln!(w, "{msg}");
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, io: &mut Io) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(io.out, "{text}");
            } else {
                let _ = write!(io.err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, io) {
        Ok(code) => code,
        Err(e) => {
            note(io.err, &format!("error: {e}"));
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run(std::env::args_os(), &mut Io { out: &mut out, err: &mut err })
}

fn execute(cli: &Cli, io: &mut Io) -> Result<i32> {
    let job = |io: &mut Io| -> Result<i32> {
        match &cli.command {
            Command::GenData(a) => cmd_gen_data(a, io),
            Command::BuildGraph(a) => cmd_build_graph(a, io),
            Command::Train(a) => cmd_train(a, io),
            Command::Eval(a) => cmd_eval(a, io),
            Command::Check(a) => cmd_check(a, io),
            Command::Bench(a) => cmd_bench(a, io),
        }
    };
    match cli.threads {
        Some(0) => return Err(Error::out_of_range("threads", "must be positive")),
        // the global pool can only be set once per process
        Some(n) if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() => {
            note(io.err, "warning: thread pool already initialised; --threads ignored");
        }
        _ => {}
    }
    job(io)
}

fn cmd_gen_data(a: &GenDataArgs, io: &mut Io) -> Result<i32> {
    let mut cfg = ExperimentConfig::load_or_default(a.config.as_deref())?.synthetic;
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = a.$field { cfg.$field = v; })* };
    }
    set!(n_attrs, dim, n_samples, coupling, coupling_spread, noise, n_hidden, seed);
    let data = generate_synthetic(&cfg)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    data.dataset.write_dir(&a.out)?;
    data.truth_graph.write(&a.out.join("truth_graph.json"))?;
    let ds = &data.dataset;
    emit(
        io.out,
        &json!({
            "command": "gen_data",
            "n_samples": ds.n_samples(),
            "n_attrs": ds.n_attrs(),
            "dim": ds.dim(),
            "n_train": ds.indices(Split::Train).len(),
            "n_val": ds.indices(Split::Val).len(),
            "n_test": ds.indices(Split::Test).len(),
            "hidden": data.hidden,
            "truth_pairs": data.truth_graph.n_pairwise(),
        }),
    )?;
    note(
        io.err,
        &format!(
            "wrote {} samples ({} attributes, {} features) to {}",
            ds.n_samples(),
            ds.n_attrs(),
            ds.dim(),
            a.out.display()
        ),
    );
    Ok(EXIT_OK)
}

fn read_split_file(path: &Path) -> Result<Vec<Split>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| Error::Parse {
                what: "split",
                line: i + 1,
                detail: format!("expected train, val or test, found {l:?}"),
            })
        })
        .collect()
}

fn cmd_build_graph(a: &BuildGraphArgs, io: &mut Io) -> Result<i32> {
    let labels: LabelMatrix = match (&a.labels, &a.data) {
        (Some(path), _) => {
            let all = read_labels(path)?;
            match &a.split {
                Some(sp) => {
                    let split = read_split_file(sp)?;
                    if split.len() != all.rows() {
                        return Err(Error::Dimension(format!(
                            "{} split rows for {} label rows",
                            split.len(),
                            all.rows()
                        )));
                    }
                    let rows: Vec<usize> = (0..split.len()).filter(|&i| split[i] == Split::Train).collect();
                    all.select_rows(&rows)
                }
                None => all,
            }
        }
        (None, Some(dir)) => Dataset::read_dir(dir)?.split_labels(Split::Train),
        (None, None) => return Err(Error::Config("build-graph needs --labels FILE or --data DIR".into())),
    };
    let name = match a.policy {
        PolicyName::Min => "min",
        PolicyName::Rand => "rand",
        PolicyName::Top => "top",
    };
    let policy = GraphPolicy::parse(name, a.param, a.seed)?;
    let graph = policy.build(&labels)?;
    graph.write(&a.out)?;
    let stats = graph.stats();
    emit(
        io.out,
        &json!({
            "command": "build_graph",
            "policy": name,
            "param": a.param,
            "graph_stats": stats,
            "hash": graph.content_hash(),
        }),
    )?;
    note(
        io.err,
        &format!(
            "{name} graph: {} variables, {} pairwise factors, degree {}..{}",
            stats.n_vars, stats.n_pairwise, stats.min_degree, stats.max_degree
        ),
    );
    Ok(EXIT_OK)
}

/// Applies the model flags on top of the config file.
fn resolve_model(m: &ModelArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load_or_default(m.config.as_deref())?;
    if let Some(d) = &m.data {
        cfg.data_dir = Some(d.clone());
    }
    if let Some(k) = m.model {
        cfg.model = k;
    }
    if let Some(g) = &m.graph {
        cfg.graph_file = Some(g.clone());
    }
    if let Some(t) = m.iterations {
        cfg.inference.iterations = t;
    }
    if let Some(s) = m.sharing {
        cfg.inference.sharing = s;
    }
    if m.hidden_dim.is_some() {
        cfg.hidden_dim = m.hidden_dim;
    }
    cfg.inference.validate()?;
    Ok(cfg)
}

fn load_data(cfg: &ExperimentConfig) -> Result<Dataset> {
    let dir = cfg
        .data_dir
        .as_ref()
        .ok_or_else(|| Error::Config("no dataset given (use --data DIR)".into()))?;
    Dataset::read_dir(dir)
}

fn load_graph(cfg: &ExperimentConfig, data: &Dataset) -> Result<Option<Arc<FactorGraph>>> {
    if !cfg.model.is_crf() {
        return Ok(None);
    }
    let graph = match (&cfg.graph_file, &cfg.graph) {
        (Some(path), _) => FactorGraph::read(path)?,
        (None, Some(policy)) => policy.build(&data.split_labels(Split::Train))?,
        (None, None) => {
            return Err(Error::Config(format!(
                "model {} needs a graph: pass --graph FILE (see build-graph)",
                cfg.model
            )))
        }
    };
    if graph.n_vars() != data.n_attrs() {
        return Err(Error::Dimension(format!(
            "graph has {} variables, dataset has {} attributes",
            graph.n_vars(),
            data.n_attrs()
        )));
    }
    Ok(Some(Arc::new(graph)))
}

fn cmd_train(a: &TrainArgs, io: &mut Io) -> Result<i32> {
    let mut cfg = resolve_model(&a.model)?;
    let t = &mut cfg.train;
    if let Some(e) = a.epochs {
        t.epochs = e;
    }
    if let Some(b) = a.batch_size {
        t.batch_size = b;
    }
    match a.preset {
        Some(Preset::Paper) => t.optimizer = OptimizerConfig::paper(),
        Some(Preset::PaperWd) => t.optimizer = OptimizerConfig::paper_weight_decay(),
        None => {}
    }
    if let Some(v) = a.lr {
        t.optimizer.learning_rate = v;
    }
    if let Some(v) = a.momentum {
        t.optimizer.momentum = v;
    }
    if let Some(v) = a.weight_decay {
        t.optimizer.weight_decay = v;
    }
    if let Some(s) = a.seed {
        t.seed = s;
    }
    cfg.zero_init |= a.zero_init;
    t.optimizer.validate()?;

    let data = load_data(&cfg)?;
    let graph = load_graph(&cfg, &data)?;
    let init = if cfg.zero_init { Init::Zeros } else { Init::Uniform { seed: cfg.train.seed } };
    let model = Model::new(
        cfg.model,
        data.n_attrs(),
        data.dim(),
        graph,
        cfg.inference,
        cfg.hidden_dim,
        init,
    )?;
    let (best, history) = train(&model, &data, &cfg.train)?;
    best.to_checkpoint().write(&a.out)?;
    if let Some(h) = &a.history {
        history.write_csv(h)?;
    }
    let best_record = history
        .best_epoch
        .and_then(|e| history.records.iter().find(|r| r.epoch == e));
    emit(
        io.out,
        &json!({
            "command": "train",
            "model": cfg.model.to_string(),
            "epochs": history.records.len(),
            "best_epoch": history.best_epoch,
            "best_val_accuracy": best_record.map(|r| r.val_accuracy),
            "best_val_f1": best_record.map(|r| r.val_f1),
            "final_train_loss": history.records.last().map(|r| r.train_loss),
            "n_params": best.params.n_params(),
        }),
    )?;
    note(
        io.err,
        &format!(
            "trained {} for {} epochs; best epoch {:?}; checkpoint {}",
            cfg.model,
            history.records.len(),
            history.best_epoch,
            a.out.display()
        ),
    );
    Ok(EXIT_OK)
}

fn cmd_eval(a: &EvalArgs, io: &mut Io) -> Result<i32> {
    let mut cfg = resolve_model(&a.model)?;
    if let Some(c) = &a.checkpoint {
        cfg.checkpoint = Some(c.clone());
    }
    cfg.zero_init |= a.zero_init;
    let data = load_data(&cfg)?;
    let model = match (&cfg.checkpoint, cfg.zero_init) {
        (Some(path), false) => {
            let ck = Checkpoint::read(path)?;
            cfg.model = ck.model;
            let graph = load_graph(&cfg, &data)?;
            Model::from_checkpoint(ck, graph)?
        }
        (None, true) => {
            let graph = load_graph(&cfg, &data)?;
            Model::new(
                cfg.model,
                data.n_attrs(),
                data.dim(),
                graph,
                cfg.inference,
                cfg.hidden_dim,
                Init::Zeros,
            )?
        }
        _ => return Err(Error::Config("eval needs exactly one of --checkpoint FILE or --zero-init".into())),
    };
    if data.indices(a.split).is_empty() {
        return Err(Error::Config(format!("split {} is empty", a.split)));
    }
    let report = evaluate(&model, &data, a.split)?;
    if let Some(path) = &a.marginals {
        let (_, probs) = predict_split(&model, &data, a.split)?;
        write_marginals_csv(path, &probs)?;
    }
    emit(
        io.out,
        &json!({
            "command": "eval",
            "model": model.kind().to_string(),
            "split": a.split.to_string(),
            "accuracy": report.accuracy,
            "avg_precision": report.avg_precision,
            "avg_recall": report.avg_recall,
            "avg_f1": report.avg_f1,
        }),
    )?;
    note(
        io.err,
        &format!(
            "{} on {}: acc {:.4}  pre {:.4}  rec {:.4}  F1 {:.4}",
            model.kind(),
            a.split,
            report.accuracy,
            report.avg_precision,
            report.avg_recall,
            report.avg_f1
        ),
    );
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs, io: &mut Io) -> Result<i32> {
    let fault = match a.inject_fault {
        FaultName::None => Fault::None,
        FaultName::GradientSign => Fault::GradientSign,
    };
    let reports = [
        check::tree_exactness(a.trees, a.max_vars, a.seed)?,
        check::uniform_pairwise_invariance(a.invariance_cases, a.seed)?,
        check::gradient_check(a.gradient_configs, a.seed, fault)?,
    ];
    let mut ok = true;
    for r in &reports {
        emit(io.out, &serde_json::to_value(r)?)?;
        note(
            io.err,
            &format!(
                "{} {}: max error {:.3e} (tolerance {:.0e}, {} cases)",
                if r.passed { "PASS" } else { "FAIL" },
                r.check,
                r.max_error,
                r.tolerance,
                r.cases
            ),
        );
        ok &= r.passed;
    }
    Ok(if ok { EXIT_OK } else { EXIT_NUMERICAL })
}

fn cmd_bench(a: &BenchArgs, io: &mut Io) -> Result<i32> {
    let counts = a.pairs.clone().unwrap_or_else(|| {
        let mut c = vec![0];
        c.extend(default_pair_counts());
        c
    });
    let rows = bench_inference(a.n_attrs, &counts, a.iterations, a.reps, a.inner, a.seed)?;
    let mut csv = String::from("n_pairwise_factors,n_factors,iterations,median_seconds\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{:e}\n", r.n_pairwise, r.n_factors, r.iterations, r.seconds));
        emit(io.out, &json!({ "command": "bench", "row": r }))?;
    }
    if let Some(path) = &a.out {
        std::fs::write(path, &csv).map_err(|e| Error::io(path, e))?;
    }

    if let Some(&largest) = counts.iter().max() {
        let doubled =
            bench_inference(a.n_attrs, &[largest], 2 * a.iterations, a.reps, a.inner, a.seed)?;
        let base = rows.iter().find(|r| r.n_pairwise == largest).map_or(f64::NAN, |r| r.seconds);
        let ratio = doubled[0].seconds / base;
        emit(
            io.out,
            &json!({
                "command": "bench",
                "doubling": { "n_pairwise": largest, "iterations": 2 * a.iterations, "ratio": ratio },
            }),
        )?;
        let per_sample = bench_predict(a.n_attrs, largest, a.dim, a.iterations, a.reps, a.seed)?;
        emit(
            io.out,
            &json!({
                "command": "bench",
                "predict": {
                    "n_attrs": a.n_attrs,
                    "n_factors": a.n_attrs + largest,
                    "dim": a.dim,
                    "seconds_per_sample": per_sample,
                },
            }),
        )?;
        note(
            io.err,
            &format!(
                "{} rows; doubling T at {largest} pairs scales time by {ratio:.2}; \
                 end-to-end prediction {per_sample:.2e} s/sample",
                rows.len()
            ),
        );
    }
    Ok(EXIT_OK)
}
