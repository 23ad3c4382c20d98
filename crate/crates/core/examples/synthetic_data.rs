//! Generates the synthetic attribute dataset, writes it to a directory and
//! reports label statistics.
//!
//!     cargo run --release --example synthetic_data -- [out_dir]

use attrcrf::graph::compute_correlation;
use attrcrf::trainer::{generate_synthetic, Dataset, SyntheticConfig};

fn main() -> attrcrf::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "synthetic_data".into());
    let cfg = SyntheticConfig::default();
    let data = generate_synthetic(&cfg)?;
    let ds = &data.dataset;
    ds.write_dir(out.as_ref())?;
    data.truth_graph.write(&std::path::Path::new(&out).join("truth_graph.json"))?;
    assert_eq!(&Dataset::read_dir(out.as_ref())?, ds);

    println!("{} samples, {} attributes, {} features -> {out}", ds.n_samples(), ds.n_attrs(), ds.dim());
    println!("hidden attributes (no feature direction): {:?}", data.hidden);
    let corr = compute_correlation(&ds.labels)?;
    for i in 0..ds.n_attrs() {
        let rate = ds.labels.column(i).iter().map(|&y| y as f64).sum::<f64>() / ds.n_samples() as f64;
        let (j, c) = (0..ds.n_attrs())
            .filter(|&j| j != i)
            .map(|j| (j, corr.get(i, j)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap_or((i, 0.0));
        println!("attr {i:>2}: positive rate {rate:.3}, most correlated with {j:>2} ({c:+.3})");
    }
    Ok(())
}
