//! Bayes-optimal macro-F1 on the synthetic test split, from the exact
//! posterior over all label vectors under the ground-truth MRF and the
//! Gaussian feature model. An upper reference for the trained models.

use attrcrf::oracle::joint_table;
use attrcrf::trainer::{generate_synthetic, metrics_from_predictions, Split, SyntheticConfig};
use attrcrf::LabelMatrix;

fn main() -> attrcrf::Result<()> {
    let seeds = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5u64);
    let mut total = 0.0;
    for seed in 0..seeds {
        let cfg = SyntheticConfig { seed, ..Default::default() };
        let s = generate_synthetic(&cfg)?;
        let (n, d) = (cfg.n_attrs, cfg.dim);
        let joint = joint_table(&s.truth_graph, &s.truth_tables)?;
        let means: Vec<Vec<f64>> = (0..1usize << n)
            .map(|st| {
                (0..d)
                    .map(|r| (0..n).map(|k| s.projection.get(r, k) * if st >> k & 1 == 1 { 1.0 } else { -1.0 }).sum())
                    .collect()
            })
            .collect();
        let ds = &s.dataset;
        let var2 = 2.0 * cfg.noise * cfg.noise;
        let mut preds = Vec::new();
        for i in ds.indices(Split::Test) {
            let z = ds.features.row(i);
            let log_w: Vec<f64> = means
                .iter()
                .zip(&joint.masses)
                .map(|(mu, m)| m.ln() - mu.iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / var2)
                .collect();
            let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
            let norm: f64 = w.iter().sum();
            preds.push(
                (0..n)
                    .map(|k| {
                        let p: f64 = w.iter().enumerate().filter(|(st, _)| st >> k & 1 == 1).map(|(_, v)| v).sum();
                        u8::from(p / norm >= 0.5)
                    })
                    .collect(),
            );
        }
        let report = metrics_from_predictions(&LabelMatrix::from_rows(&preds)?, &ds.split_labels(Split::Test));
        println!("seed {seed}: Bayes macro-F1 {:.4}", report.avg_f1);
        total += report.avg_f1;
    }
    println!("mean: {:.4}", total / seeds as f64);
    Ok(())
}
