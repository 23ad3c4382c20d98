//! Inference time against the number of pairwise factors on a 102-attribute
//! graph, plus end-to-end per-sample prediction time.

use attrcrf::bench::{bench_inference, bench_predict, default_pair_counts};

fn main() -> attrcrf::Result<()> {
    let mut counts = vec![0];
    counts.extend(default_pair_counts());
    println!("n_pairwise_factors,n_factors,median_seconds");
    for r in bench_inference(102, &counts, 2, 7, 50, 0)? {
        println!("{},{},{:.3e}", r.n_pairwise, r.n_factors, r.seconds);
    }
    let t2 = bench_inference(102, &[600], 2, 7, 50, 0)?[0].seconds;
    let t4 = bench_inference(102, &[600], 4, 7, 50, 0)?[0].seconds;
    println!("T 2 -> 4 at 600 pairs: x{:.2}", t4 / t2);
    let p = bench_predict(102, 598, 512, 2, 7, 0)?;
    println!("per-sample prediction (102 attributes, 700 factors, 512 features): {p:.2e} s");
    Ok(())
}
