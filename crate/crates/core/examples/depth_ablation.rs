//! Linear CRF macro-F1 as a function of the number of message-passing
//! rounds, with shared and per-iteration potentials.
//!
//!     cargo run --release --example depth_ablation -- [seeds] [epochs] [key=value ...]

use std::sync::Arc;

use attrcrf::trainer::{fit_and_evaluate, generate_synthetic, Init, ModelKind, Split, SyntheticConfig, TrainConfig};
use attrcrf::{GraphPolicy, InferenceConfig, Sharing};

fn main() -> attrcrf::Result<()> {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let args: Vec<usize> = raw.iter().filter_map(|a| a.parse().ok()).collect();
    let mut base = serde_json::to_value(SyntheticConfig::default())?;
    for (k, v) in raw.iter().filter_map(|a| a.split_once('=')) {
        base[k] = serde_json::from_str(v)?;
    }
    let base: SyntheticConfig = serde_json::from_value(base)?;
    let seeds = args.first().copied().unwrap_or(3);
    let epochs = args.get(1).copied().unwrap_or(40);
    let depths = [1, 2, 4, 8];
    let modes = [Sharing::Shared, Sharing::Independent];

    let mut totals = vec![[0.0; 2]; depths.len()];
    for seed in 0..seeds as u64 {
        let data = generate_synthetic(&SyntheticConfig { seed, ..base.clone() })?;
        let graph = Arc::new(GraphPolicy::Min { k: 2 }.build(&data.dataset.split_labels(Split::Train))?);
        for (d, &t) in depths.iter().enumerate() {
            for (m, &mode) in modes.iter().enumerate() {
                let (_, _, report) = fit_and_evaluate(
                    ModelKind::LinearCrf,
                    &data.dataset,
                    Some(graph.clone()),
                    InferenceConfig::new(t, mode),
                    Init::Uniform { seed },
                    &TrainConfig { epochs, seed, ..Default::default() },
                )?;
                totals[d][m] += report.avg_f1;
                eprintln!("seed {seed} T={t} {mode:?}: {:.4}", report.avg_f1);
            }
        }
    }
    println!("T,shared,independent");
    for (d, t) in depths.iter().enumerate() {
        let n = seeds as f64;
        println!("{t},{:.4},{:.4}", totals[d][0] / n, totals[d][1] / n);
    }
    Ok(())
}
