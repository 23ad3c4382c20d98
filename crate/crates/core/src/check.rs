//! Self-checks of inference and gradients against the independent oracles.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::graph::{build_graph_rand, FactorGraph};
use crate::inference::{marginals, InferenceConfig, Sharing, TableSet};
use crate::oracle::{exact_marginals, finite_diff};
use crate::trainer::{Init, Model, ModelKind};

pub const TREE_TOLERANCE: f64 = 1e-9;
pub const INVARIANCE_TOLERANCE: f64 = 1e-12;
pub const GRADIENT_REL_TOLERANCE: f64 = 1e-4;
pub const GRADIENT_ABS_FLOOR: f64 = 1e-8;
pub const FD_STEP: f64 = 1e-5;

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: &'static str,
    pub cases: usize,
    pub max_error: f64,
    /// Largest raw absolute discrepancy.
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(check: &'static str, cases: usize, max_error: f64, tolerance: f64) -> Self {
        CheckReport {
            check,
            cases,
            max_error,
            max_abs_error: max_error,
            tolerance,
            passed: max_error < tolerance,
        }
    }
}

/// Deliberate defects for exercising the checks themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Negates the analytic gradient before comparison.
    GradientSign,
}

/// Uniform random tree: each vertex `i > 0` attaches to a random earlier one.
pub fn random_tree(n_vars: usize, rng: &mut impl Rng) -> Result<FactorGraph> {
    let mut pairs: Vec<(usize, usize)> = (1..n_vars).map(|i| (rng.random_range(0..i), i)).collect();
    pairs.sort_unstable();
    FactorGraph::new(n_vars, &pairs)
}

/// Tables with entries `exp(U(-2, 2))`.
pub fn random_positive_tables(graph: &FactorGraph, rng: &mut impl Rng) -> TableSet {
    let mut t = TableSet::zeros(graph);
    for v in t.values_mut() {
        *v = rng.random_range(-2.0..2.0f64).exp();
    }
    t
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Sum-product at `T = diameter` against enumeration on random trees with
/// 2 to `max_vars` variables.
pub fn tree_exactness(n_trees: usize, max_vars: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_trees {
        let n = rng.random_range(2..=max_vars.max(2));
        let graph = random_tree(n, &mut rng)?;
        let tables = random_positive_tables(&graph, &mut rng);
        let diameter = graph.stats().diameter.unwrap_or(1).max(1);
        let cfg = InferenceConfig::new(diameter, Sharing::Shared);
        let bp = marginals(&graph, std::slice::from_ref(&tables), &cfg)?;
        let exact = exact_marginals(&graph, &tables)?;
        worst = worst.max(max_abs_diff(&bp.probs(), &exact.probs()));
    }
    Ok(CheckReport::new("tree_exactness", n_trees, worst, TREE_TOLERANCE))
}

/// Constant pairwise tables on random loopy graphs leave the unary-only
/// marginals unchanged.
pub fn uniform_pairwise_invariance(n_cases: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for case in 0..n_cases {
        let n = rng.random_range(2..=10);
        let n_pairs = rng.random_range(0..=n * (n - 1) / 2);
        let graph = build_graph_rand(n, n_pairs, rng.random())?;
        let iterations = rng.random_range(1..=5);
        let sharing = if case % 2 == 0 { Sharing::Shared } else { Sharing::Independent };
        let cfg = InferenceConfig::new(iterations, sharing);
        let unary = graph.unary_only();
        let unary_tables = random_positive_tables(&unary, &mut rng);
        let sets: Vec<TableSet> = (0..cfg.table_sets())
            .map(|_| {
                let mut t = TableSet::zeros(&graph);
                for i in 0..n {
                    t.table_mut(i).copy_from_slice(unary_tables.table(i));
                }
                for f in graph.pairwise_factors() {
                    let c = rng.random_range(-3.0..3.0f64).exp();
                    t.table_mut(f.id).fill(c);
                }
                t
            })
            .collect();
        let unary_sets = vec![unary_tables; cfg.table_sets()];
        let full = marginals(&graph, &sets, &cfg)?;
        let reference = marginals(&unary, &unary_sets, &cfg)?;
        worst = worst.max(max_abs_diff(&full.probs(), &reference.probs()));
    }
    Ok(CheckReport::new(
        "uniform_pairwise_invariance",
        n_cases,
        worst,
        INVARIANCE_TOLERANCE,
    ))
}

/// Error of one gradient coordinate: zero within the absolute floor,
/// relative otherwise.
pub fn gradient_error(analytic: f64, numeric: f64) -> f64 {
    let diff = (analytic - numeric).abs();
    if diff <= GRADIENT_ABS_FLOOR {
        0.0
    } else {
        diff / analytic.abs().max(numeric.abs())
    }
}

/// Full-pipeline gradient of the BCE loss (through inference and heads)
/// against central differences, for `linear_crf` with 5 attributes, 8
/// features and 2 rounds.
pub fn gradient_check(n_configs: usize, seed: u64, fault: Fault) -> Result<CheckReport> {
    let (n, dim) = (5, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    for case in 0..n_configs {
        let graph = Arc::new(build_graph_rand(n, rng.random_range(3..=10), rng.random())?);
        let sharing = if case % 2 == 0 { Sharing::Shared } else { Sharing::Independent };
        let model = Model::new(
            ModelKind::LinearCrf,
            n,
            dim,
            Some(graph),
            InferenceConfig::new(2, sharing),
            None,
            Init::Uniform { seed: rng.random() },
        )?;
        let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();

        let grad = model.sample_grad(&z, &y)?;
        let mut analytic = grad.params.flatten();
        analytic.extend_from_slice(&grad.z);
        if fault == Fault::GradientSign {
            analytic.iter_mut().for_each(|g| *g = -*g);
        }

        let mut point = model.params.flatten();
        let n_params = point.len();
        point.extend_from_slice(&z);
        let loss = |p: &[f64]| {
            let mut m = model.clone();
            m.params.load(&p[..n_params]).expect("same parameter count");
            m.loss(&p[n_params..], &y).unwrap_or(f64::NAN)
        };
        let numeric = finite_diff(loss, &point, FD_STEP)?;
        for (a, b) in analytic.iter().zip(&numeric) {
            worst = worst.max(gradient_error(*a, *b));
            worst_abs = worst_abs.max((a - b).abs());
        }
    }
    Ok(CheckReport {
        max_abs_error: worst_abs,
        ..CheckReport::new("gradient", n_configs, worst, GRADIENT_REL_TOLERANCE)
    })
}

/// The three suites with their default sizes.
pub fn run_all(seed: u64, fault: Fault) -> Result<Vec<CheckReport>> {
    Ok(vec![
        tree_exactness(20, 10, seed)?,
        uniform_pairwise_invariance(20, seed)?,
        gradient_check(10, seed, fault)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        for r in run_all(3, Fault::None).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn sign_fault_is_caught() {
        let r = gradient_check(2, 0, Fault::GradientSign).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn gradient_error_floor() {
        assert_eq!(gradient_error(0.0, 5e-12), 0.0);
        assert!((gradient_error(1.0, 1.1) - 0.1 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn random_tree_is_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..12 {
            assert!(random_tree(n, &mut rng).unwrap().is_tree());
        }
    }
}
