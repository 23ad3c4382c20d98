//! Trains the sigmoid baseline, Const CRF and Linear CRF on synthetic data
//! with hidden attribute directions and prints test macro-F1 per seed.
//!
//!     cargo run --release --example compare_models -- [seeds] [epochs] [key=value ...]
//!
//! `key=value` pairs override fields of the synthetic config, e.g. `noise=1.5`.

use std::sync::Arc;

use attrcrf::graph::{build_graph_min, compute_correlation};
use attrcrf::trainer::{evaluate, generate_synthetic, train, Init, Model, ModelKind, Split, SyntheticConfig, TrainConfig};
use attrcrf::{InferenceConfig, Sharing};

fn main() -> attrcrf::Result<()> {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let args: Vec<usize> = raw.iter().filter_map(|a| a.parse().ok()).collect();
    let seeds = args.first().copied().unwrap_or(3);
    let epochs = args.get(1).copied().unwrap_or(40);
    let mut base = serde_json::to_value(SyntheticConfig::default())?;
    for (k, v) in raw.iter().filter_map(|a| a.split_once('=')) {
        base[k] = serde_json::from_str(v)?;
    }
    let base: SyntheticConfig = serde_json::from_value(base)?;

    let kinds = [ModelKind::Sigmoid, ModelKind::ConstCrf, ModelKind::LinearCrf];
    let mut totals = [0.0; 3];
    for seed in 0..seeds as u64 {
        let data = generate_synthetic(&SyntheticConfig { seed, ..base.clone() })?;
        let ds = &data.dataset;
        let corr = compute_correlation(&ds.split_labels(Split::Train))?;
        let graph = Arc::new(build_graph_min(&corr, 2)?);
        print!("seed {seed} ({} pairwise factors):", graph.n_pairwise());
        for (k, &kind) in kinds.iter().enumerate() {
            let model = Model::new(
                kind,
                ds.n_attrs(),
                ds.dim(),
                kind.is_crf().then(|| graph.clone()),
                InferenceConfig::new(2, Sharing::Shared),
                None,
                Init::Uniform { seed },
            )?;
            let cfg = TrainConfig { epochs, seed, ..Default::default() };
            let (best, _) = train(&model, ds, &cfg)?;
            let f1 = evaluate(&best, ds, Split::Test)?.avg_f1;
            totals[k] += f1;
            print!("  {kind} {f1:.4}");
        }
        println!();
    }
    for (kind, t) in kinds.iter().zip(totals) {
        println!("mean {kind}: {:.4}", t / seeds as f64);
    }
    Ok(())
}
