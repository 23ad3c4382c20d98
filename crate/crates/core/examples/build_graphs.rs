//! Builds `min`, `top` and `rand` graphs from the label correlations of a
//! synthetic dataset and compares them with the ground-truth structure.
//!
//!     cargo run --release --example build_graphs -- [K]

use std::collections::BTreeSet;

use attrcrf::graph::compute_correlation;
use attrcrf::trainer::{generate_synthetic, Split, SyntheticConfig};
use attrcrf::GraphPolicy;

fn main() -> attrcrf::Result<()> {
    let k = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let data = generate_synthetic(&SyntheticConfig::default())?;
    let labels = data.dataset.split_labels(Split::Train);
    let corr = compute_correlation(&labels)?;
    let truth: BTreeSet<_> = data.truth_graph.pairs().into_iter().collect();
    println!("ground truth: {} pairs, hidden attributes {:?}", truth.len(), data.hidden);

    let min = GraphPolicy::Min { k }.build(&labels)?;
    let n_pairs = min.n_pairwise();
    for graph in [
        min,
        GraphPolicy::Top { n_pairs }.build(&labels)?,
        GraphPolicy::Rand { n_pairs, seed: 0 }.build(&labels)?,
    ] {
        let pairs = graph.pairs();
        let hits = pairs.iter().filter(|p| truth.contains(p)).count();
        let s = graph.stats();
        println!(
            "{:>4} pairs, degree {}..{}, diameter {:?}, {} of them true edges",
            s.n_pairwise, s.min_degree, s.max_degree, s.diameter, hits
        );
    }

    let mut strongest: Vec<_> = truth.iter().map(|&(i, j)| ((i, j), corr.get(i, j))).collect();
    strongest.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    println!("strongest true-edge correlations:");
    for ((i, j), c) in strongest.iter().take(5) {
        println!("  ({i:>2}, {j:>2})  {c:+.3}");
    }
    println!("{}", GraphPolicy::Min { k }.build(&labels)?.to_json());
    Ok(())
}
