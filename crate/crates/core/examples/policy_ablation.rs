//! Linear CRF on graphs from the `min`, `top` and `rand` policies with the
//! same number of pairwise factors.
//!
//!     cargo run --release --example policy_ablation -- [seeds] [epochs] [K] [key=value ...]

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
    let k = args.get(2).copied().unwrap_or(2);

    let mut totals = [0.0; 3];
    for seed in 0..seeds as u64 {
        let data = generate_synthetic(&SyntheticConfig { seed, ..base.clone() })?;
        let labels = data.dataset.split_labels(Split::Train);
        let min = GraphPolicy::Min { k }.build(&labels)?;
        let n_pairs = min.n_pairwise();
        let graphs = [
            min,
            GraphPolicy::Top { n_pairs }.build(&labels)?,
            GraphPolicy::Rand { n_pairs, seed }.build(&labels)?,
        ];
        print!("seed {seed} ({n_pairs} pairs):");
        for (i, g) in graphs.into_iter().enumerate() {
            let (_, _, report) = fit_and_evaluate(
                ModelKind::LinearCrf,
                &data.dataset,
                Some(Arc::new(g)),
                InferenceConfig::new(2, Sharing::Shared),
                Init::Uniform { seed },
                &TrainConfig { epochs, seed, ..Default::default() },
            )?;
            totals[i] += report.avg_f1;
            print!("  {} {:.4}", ["min", "top", "rand"][i], report.avg_f1);
        }
        println!();
    }
    for (name, t) in ["min", "top", "rand"].iter().zip(totals) {
        println!("mean {name}: {:.4}", t / seeds as f64);
    }
    Ok(())
}
