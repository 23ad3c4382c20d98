//! Enumeration oracle vs Gibbs sampling vs sum-product on a random tree,
//! where sum-product is exact after `diameter` rounds.

use attrcrf::check::{random_positive_tables, random_tree};
use attrcrf::inference::marginals;
use attrcrf::oracle::{exact_marginals, gibbs_sample, joint_table};
use attrcrf::{InferenceConfig, Sharing};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> attrcrf::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let graph = random_tree(9, &mut rng)?;
    let tables = random_positive_tables(&graph, &mut rng);
    let diameter = graph.stats().diameter.unwrap_or(1);

    let joint = joint_table(&graph, &tables)?;
    println!("partition function Z = {:.6}", joint.partition);
    let exact = exact_marginals(&graph, &tables)?;
    let bp = marginals(
        &graph,
        std::slice::from_ref(&tables),
        &InferenceConfig::new(diameter, Sharing::Shared),
    )?;
    let samples = gibbs_sample(&graph, &tables, 50_000, 500, 1)?;
    println!("var   exact     sum-product(T={diameter})  gibbs");
    for i in 0..graph.n_vars() {
        let freq = samples.column(i).iter().map(|&y| y as f64).sum::<f64>() / samples.rows() as f64;
        println!("{i:>3}   {:.6}  {:.6}             {:.4}", exact.p(i), bp.p(i), freq);
    }
    Ok(())
}
