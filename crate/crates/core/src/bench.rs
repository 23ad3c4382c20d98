//! Timing of inference and end-to-end prediction.

use std::hint::black_box;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::check::random_positive_tables;
use crate::error::{Error, Result};
use crate::graph::build_graph_rand;
use crate::inference::{marginals, InferenceConfig, Sharing};
use crate::trainer::{Init, Model, ModelKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n_pairwise: usize,
    pub n_factors: usize,
    pub iterations: usize,
    /// Median seconds per call.
    pub seconds: f64,
}

/// Median over `reps` repetitions of the mean time per call of `f`, each
/// repetition making `inner` calls. One untimed repetition runs first.
pub fn median_time<F: FnMut()>(reps: usize, inner: usize, mut f: F) -> f64 {
    let inner = inner.max(1);
    for _ in 0..inner {
        f();
    }
    let mut times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            for _ in 0..inner {
                f();
            }
            start.elapsed().as_secs_f64() / inner as f64
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let m = times.len();
    if m % 2 == 1 {
        times[m / 2]
    } else {
        0.5 * (times[m / 2 - 1] + times[m / 2])
    }
}

/// Sum-product time on `rand` graphs over `n_vars` variables for each
/// pairwise-factor count.
pub fn bench_inference(
    n_vars: usize,
    pair_counts: &[usize],
    iterations: usize,
    reps: usize,
    inner: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if reps < 5 {
        return Err(Error::out_of_range("reps", format!("{reps} < 5")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = InferenceConfig::new(iterations, Sharing::Shared);
    pair_counts
        .iter()
        .map(|&n_pairs| {
            let graph = build_graph_rand(n_vars, n_pairs, seed)?;
            let tables = vec![random_positive_tables(&graph, &mut rng)];
            marginals(&graph, &tables, &cfg)?;
            let seconds = median_time(reps, inner, || {
                black_box(marginals(&graph, black_box(&tables), &cfg).ok());
            });
            Ok(BenchRow {
                n_pairwise: n_pairs,
                n_factors: graph.n_factors(),
                iterations,
                seconds,
            })
        })
        .collect()
}

/// Per-sample `linear_crf` prediction time (potential heads plus inference)
/// for `dim`-dimensional features.
pub fn bench_predict(
    n_vars: usize,
    n_pairs: usize,
    dim: usize,
    iterations: usize,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    let graph = Arc::new(build_graph_rand(n_vars, n_pairs, seed)?);
    let model = Model::new(
        ModelKind::LinearCrf,
        n_vars,
        dim,
        Some(graph),
        InferenceConfig::new(iterations, Sharing::Shared),
        None,
        Init::Uniform { seed },
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    model.predict(&z)?;
    Ok(median_time(reps, 10, || {
        black_box(model.predict(black_box(&z)).ok());
    }))
}

/// `100, 200, ..., 900`.
pub fn default_pair_counts() -> Vec<usize> {
    (1..=9).map(|k| 100 * k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        let mut calls = 0;
        let t = median_time(5, 2, || calls += 1);
        assert_eq!(calls, 12);
        assert!(t >= 0.0);
    }

    #[test]
    fn rows_follow_pair_counts() {
        let rows = bench_inference(20, &[0, 10, 30], 2, 5, 2, 0).unwrap();
        let counts: Vec<_> = rows.iter().map(|r| (r.n_pairwise, r.n_factors)).collect();
        assert_eq!(counts, vec![(0, 20), (10, 30), (30, 50)]);
        assert!(bench_inference(20, &[0], 2, 4, 1, 0).is_err());
    }

    #[test]
    fn predict_timing_runs() {
        assert!(bench_predict(10, 5, 4, 2, 5, 0).unwrap() > 0.0);
    }
}
