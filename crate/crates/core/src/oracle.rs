//! Ground-truth engines used to validate inference and training.
//!
//! Nothing here is used for model inference: enumeration and finite
//! differences check the message-passing code, and the Gibbs sampler only
//! generates synthetic labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{FactorGraph, FactorKind};
use crate::inference::{Marginals, TableSet};
use crate::matrix::LabelMatrix;

/// Enumeration is refused above this many variables.
pub const MAX_ENUM_VARS: usize = 20;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Unnormalised masses of all `2^N` assignments; bit `i` is variable `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub n_vars: usize,
    pub masses: Vec<f64>,
    pub partition: f64,
}

impl JointTable {
    pub fn marginals(&self) -> Marginals {
        let mut ones = vec![KahanSum::default(); self.n_vars];
        for (a, &m) in self.masses.iter().enumerate() {
            for (i, acc) in ones.iter_mut().enumerate() {
                if a >> i & 1 == 1 {
                    acc.add(m);
                }
            }
        }
        Marginals {
            beliefs: ones
                .iter()
                .map(|s| {
                    let p1 = s.value() / self.partition;
                    [1.0 - p1, p1]
                })
                .collect(),
        }
    }
}

fn check_enumerable(graph: &FactorGraph, tables: &TableSet) -> Result<()> {
    if graph.n_vars() > MAX_ENUM_VARS {
        return Err(Error::EnumerationGuard(graph.n_vars()));
    }
    if !tables.matches(graph) {
        return Err(Error::Dimension("tables do not match the graph".into()));
    }
    Ok(())
}

fn assignment_mass(graph: &FactorGraph, tables: &TableSet, a: usize) -> f64 {
    graph
        .factors()
        .iter()
        .map(|f| {
            let idx = f.scope.iter().fold(0, |acc, &v| acc * 2 + (a >> v & 1));
            tables.table(f.id)[idx]
        })
        .product()
}

/// The full joint table `Π_c φ_c` and its partition function.
pub fn joint_table(graph: &FactorGraph, tables: &TableSet) -> Result<JointTable> {
    check_enumerable(graph, tables)?;
    let n = graph.n_vars();
    let mut z = KahanSum::default();
    let masses: Vec<f64> = (0..1usize << n)
        .map(|a| {
            let m = assignment_mass(graph, tables, a);
            z.add(m);
            m
        })
        .collect();
    let partition = z.value();
    if !(partition > 0.0) {
        return Err(Error::Value(format!("partition function is {partition}")));
    }
    Ok(JointTable {
        n_vars: n,
        masses,
        partition,
    })
}

/// Exact marginals `p(x_i = 1)` by summing the joint over all assignments.
pub fn exact_marginals(graph: &FactorGraph, tables: &TableSet) -> Result<Marginals> {
    check_enumerable(graph, tables)?;
    let n = graph.n_vars();
    let mut z = KahanSum::default();
    let mut ones = vec![KahanSum::default(); n];
    for a in 0..1usize << n {
        let m = assignment_mass(graph, tables, a);
        z.add(m);
        for (i, acc) in ones.iter_mut().enumerate() {
            if a >> i & 1 == 1 {
                acc.add(m);
            }
        }
    }
    let partition = z.value();
    if !(partition > 0.0) {
        return Err(Error::Value(format!("partition function is {partition}")));
    }
    Ok(Marginals {
        beliefs: ones
            .iter()
            .map(|s| {
                let p1 = s.value() / partition;
                [1.0 - p1, p1]
            })
            .collect(),
    })
}

/// Central-difference gradient `(f(θ+h) − f(θ−h)) / 2h` per coordinate.
pub fn finite_diff<F>(loss: F, params: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if !(1e-7..=1e-3).contains(&step) {
        return Err(Error::out_of_range("step", format!("{step} not in [1e-7, 1e-3]")));
    }
    let mut p = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        p[i] = params[i] + step;
        let up = loss(&p);
        p[i] = params[i] - step;
        let down = loss(&p);
        p[i] = params[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::NonFinite(format!("loss near coordinate {i}")));
        }
        grad.push((up - down) / (2.0 * step));
    }
    Ok(grad)
}

/// Systematic-scan Gibbs sampler over the CRF defined by `graph` and `tables`.
///
/// One sample is recorded per full sweep after `burn_in` sweeps.
pub fn gibbs_sample(
    graph: &FactorGraph,
    tables: &TableSet,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
) -> Result<LabelMatrix> {
    gibbs_sample_thinned(graph, tables, n_samples, burn_in, 1, seed)
}

/// As [`gibbs_sample`], recording one sample every `thin` sweeps.
pub fn gibbs_sample_thinned(
    graph: &FactorGraph,
    tables: &TableSet,
    n_samples: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<LabelMatrix> {
    if !tables.matches(graph) {
        return Err(Error::Dimension("tables do not match the graph".into()));
    }
    if let Some(v) = tables.values().iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Value(format!(
            "Gibbs sampling needs strictly positive finite potentials, found {v}"
        )));
    }
    let thin = thin.max(1);
    let n = graph.n_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let mut out = LabelMatrix::zeros(n_samples, n);

    let sweep = |x: &mut Vec<usize>, rng: &mut ChaCha8Rng| {
        for v in graph.variables() {
            let mut w = [1.0, 1.0];
            for &f in &v.factor_neighbors {
                let fac = &graph.factors()[f];
                let t = tables.table(f);
                match fac.kind {
                    FactorKind::Unary => {
                        w[0] *= t[0];
                        w[1] *= t[1];
                    }
                    FactorKind::Pairwise => {
                        let (a, b) = (fac.scope[0], fac.scope[1]);
                        for (s, ws) in w.iter_mut().enumerate() {
                            let (xa, xb) = if a == v.id { (s, x[b]) } else { (x[a], s) };
                            *ws *= t[xa * 2 + xb];
                        }
                    }
                }
            }
            let p1 = w[1] / (w[0] + w[1]);
            x[v.id] = usize::from(rng.random::<f64>() < p1);
        }
    };

    for _ in 0..burn_in {
        sweep(&mut x, &mut rng);
    }
    for s in 0..n_samples {
        for _ in 0..thin {
            sweep(&mut x, &mut rng);
        }
        for (dst, &v) in out.row_mut(s).iter_mut().zip(&x) {
            *dst = v as u8;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::compute_correlation;
    use crate::potentials::PotentialTable;

    fn set(graph: &FactorGraph, tables: &[&[f64]]) -> TableSet {
        let t: Vec<_> = tables
            .iter()
            .map(|v| PotentialTable { values: v.to_vec() })
            .collect();
        TableSet::from_tables(graph, &t).unwrap()
    }

    #[test]
    fn exact_examples() {
        let u = FactorGraph::new(1, &[]).unwrap();
        let m = exact_marginals(&u, &set(&u, &[&[1.0, 3.0]])).unwrap();
        assert!((m.p(0) - 0.75).abs() < 1e-15);

        let g = FactorGraph::new(2, &[(0, 1)]).unwrap();
        let t = set(&g, &[&[1.0, 2.0], &[1.0, 1.0], &[2.0, 1.0, 1.0, 2.0]]);
        let m = exact_marginals(&g, &t).unwrap();
        assert!((m.p(0) - 2.0 / 3.0).abs() < 1e-15);
        let j = joint_table(&g, &t).unwrap();
        assert_eq!(j.partition, 9.0);
        // bit 0 = variable 0: (x0, x1) = (0,0), (1,0), (0,1), (1,1)
        assert_eq!(j.masses, vec![2.0, 2.0, 1.0, 4.0]);
        assert_eq!(j.marginals(), m);

        let uni = TableSet::filled(&g, 0.4);
        let m = exact_marginals(&g, &uni).unwrap();
        assert!(m.probs().iter().all(|&p| (p - 0.5).abs() < 1e-15));
        for b in &m.beliefs {
            assert!((b[0] + b[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_guard() {
        let g = FactorGraph::new(21, &[]).unwrap();
        let t = TableSet::filled(&g, 1.0);
        assert!(matches!(exact_marginals(&g, &t), Err(Error::EnumerationGuard(21))));
    }

    #[test]
    fn finite_diff_examples() {
        let g = finite_diff(|p| p[0] * p[0], &[3.0], 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-8);
        let g = finite_diff(|_| 4.0, &[1.0, 2.0, 3.0], 1e-4).unwrap();
        assert_eq!(g, vec![0.0; 3]);
        assert!(finite_diff(|p| p[0], &[1.0], 1e-2).is_err());
        assert!(matches!(
            finite_diff(|p| 1.0 / (p[0] - 1.0).abs().min(0.0), &[1.0], 1e-5),
            Err(Error::NonFinite(_))
        ));
        // quadratic: central differences exact up to rounding
        let q = |p: &[f64]| 2.0 * p[0] * p[0] - 3.0 * p[0] * p[1] + p[1] * p[1];
        let g = finite_diff(q, &[0.7, -1.2], 1e-4).unwrap();
        assert!((g[0] - (4.0 * 0.7 + 3.6)).abs() < 1e-9);
        assert!((g[1] - (-2.1 - 2.4)).abs() < 1e-9);
    }

    #[test]
    fn gibbs_independent_coins() {
        let g = FactorGraph::new(3, &[]).unwrap();
        let t = TableSet::filled(&g, 1.0);
        let s = gibbs_sample(&g, &t, 100_000, 10, 3).unwrap();
        for j in 0..3 {
            let mean = s.column(j).iter().map(|&v| v as f64).sum::<f64>() / 1e5;
            assert!((0.49..=0.51).contains(&mean), "column {j} mean {mean}");
        }
    }

    #[test]
    fn gibbs_attractive_pair() {
        let g = FactorGraph::new(2, &[(0, 1)]).unwrap();
        let t = set(&g, &[&[1.0, 1.0], &[1.0, 1.0], &[10.0, 1.0, 1.0, 10.0]]);
        let s = gibbs_sample(&g, &t, 50_000, 100, 11).unwrap();
        let c = compute_correlation(&s).unwrap().get(0, 1);
        // exact joint: P(equal) = 20/22, corr = (20 - 2) / 22
        assert!((c - 18.0 / 22.0).abs() < 0.05, "corr {c}");
        assert_eq!(s, gibbs_sample(&g, &t, 50_000, 100, 11).unwrap());
    }

    #[test]
    fn gibbs_matches_exact_marginals() {
        let g = FactorGraph::new(4, &[(0, 1), (1, 2), (0, 3), (2, 3)]).unwrap();
        let t = set(
            &g,
            &[
                &[1.0, 2.0],
                &[3.0, 1.0],
                &[1.0, 1.0],
                &[1.0, 0.5],
                &[3.0, 1.0, 1.0, 3.0],
                &[1.0, 2.0, 2.0, 1.0],
                &[2.0, 1.0, 1.0, 4.0],
                &[1.0, 1.5, 1.0, 1.0],
            ],
        );
        let exact = exact_marginals(&g, &t).unwrap();
        let s = gibbs_sample(&g, &t, 100_000, 100, 5).unwrap();
        for j in 0..4 {
            let mean = s.column(j).iter().map(|&v| v as f64).sum::<f64>() / 1e5;
            assert!((mean - exact.p(j)).abs() < 0.01, "var {j}: {mean} vs {}", exact.p(j));
        }
    }

    #[test]
    fn gibbs_rejects_zero_mass() {
        let g = FactorGraph::new(2, &[(0, 1)]).unwrap();
        let t = set(&g, &[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 0.0, 1.0, 1.0]]);
        assert!(matches!(gibbs_sample(&g, &t, 10, 0, 0), Err(Error::Value(_))));
    }
}
