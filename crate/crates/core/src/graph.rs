//! Factor graphs over binary attributes and sparse construction policies.
//!
//! Every graph carries exactly one unary factor per variable (factor id `i`
//! for variable `i`), followed by pairwise factors stored in ascending
//! lexicographic `(i, j)` order with `i < j`. Edges are numbered in factor
//! order, so factor `f` owns the contiguous edge range
//! `edge_start(f)..edge_start(f) + scope_len`.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::LabelMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Unary,
    Pairwise,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableNode {
    pub id: usize,
    pub name: String,
    /// Factor ids in ascending order.
    pub factor_neighbors: Vec<usize>,
    /// Edge ids, parallel to `factor_neighbors`.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorNode {
    pub id: usize,
    pub scope: Vec<usize>,
    pub kind: FactorKind,
    pub edge_start: usize,
}

impl FactorNode {
    pub fn n_states(&self) -> usize {
        1 << self.scope.len()
    }
}

/// An edge between a factor and one variable of its scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub factor: usize,
    pub variable: usize,
    /// Position of `variable` inside the factor scope.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    variables: Vec<VariableNode>,
    factors: Vec<FactorNode>,
    edges: Vec<Edge>,
}

/// On-disk graph representation; unary factors are implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n_vars: usize,
    pub names: Vec<String>,
    pub pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_vars: usize,
    pub n_unary: usize,
    pub n_pairwise: usize,
    /// Smallest pairwise-factor count over variables.
    pub min_degree: usize,
    pub max_degree: usize,
    /// Longest shortest path in variable hops; `None` when disconnected.
    pub diameter: Option<usize>,
    pub disconnected: bool,
}

fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("attr{i}")).collect()
}

impl FactorGraph {
    /// Builds a graph with a unary factor per variable and the given pairs.
    ///
    /// Pairs are normalised to `i < j`, sorted and must be unique.
    pub fn new(n_vars: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::with_names(default_names(n_vars), pairs)
    }

    pub fn with_names(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut set = BTreeSet::new();
        for &(a, b) in pairs {
            if a == b {
                return Err(Error::Value(format!("self-pair ({a}, {a})")));
            }
            if a >= n || b >= n {
                return Err(Error::out_of_range(
                    "pair",
                    format!("({a}, {b}) with {n} variables"),
                ));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::Value(format!("duplicate pair ({a}, {b})")));
            }
        }

        let mut factors = Vec::with_capacity(n + set.len());
        let mut edges = Vec::with_capacity(n + 2 * set.len());
        let mut variables: Vec<VariableNode> = names
            .into_iter()
            .enumerate()
            .map(|(id, name)| VariableNode {
                id,
                name,
                factor_neighbors: Vec::new(),
                edges: Vec::new(),
            })
            .collect();

        let scopes = (0..n).map(|i| vec![i]).chain(set.iter().map(|&(a, b)| vec![a, b]));
        for (id, scope) in scopes.enumerate() {
            let edge_start = edges.len();
            for (position, &v) in scope.iter().enumerate() {
                variables[v].factor_neighbors.push(id);
                variables[v].edges.push(edges.len());
                edges.push(Edge {
                    factor: id,
                    variable: v,
                    position,
                });
            }
            let kind = if scope.len() == 1 {
                FactorKind::Unary
            } else {
                FactorKind::Pairwise
            };
            factors.push(FactorNode {
                id,
                scope,
                kind,
                edge_start,
            });
        }

        Ok(FactorGraph {
            variables,
            factors,
            edges,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn n_pairwise(&self) -> usize {
        self.factors.len() - self.variables.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn variables(&self) -> &[VariableNode] {
        &self.variables
    }

    pub fn factors(&self) -> &[FactorNode] {
        &self.factors
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn unary_factor(&self, var: usize) -> usize {
        var
    }

    /// Pairwise factors, in id order.
    pub fn pairwise_factors(&self) -> &[FactorNode] {
        &self.factors[self.variables.len()..]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.pairwise_factors()
            .iter()
            .map(|f| (f.scope[0], f.scope[1]))
            .collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    /// Same variables, pairwise factors dropped.
    pub fn unary_only(&self) -> FactorGraph {
        FactorGraph::with_names(self.names(), &[]).expect("names already validated")
    }

    /// Checks every structural invariant; used by tests and after loading.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        let bad = |msg: String| Err(Error::Value(msg));
        for (k, v) in self.variables.iter().enumerate() {
            if v.id != k {
                return bad(format!("variable at index {k} has id {}", v.id));
            }
            if v.factor_neighbors.len() != v.edges.len() {
                return bad(format!("variable {k}: neighbor/edge lists disagree"));
            }
            if v.factor_neighbors.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("variable {k}: factor neighbors not strictly ascending"));
            }
            for (&f, &e) in v.factor_neighbors.iter().zip(&v.edges) {
                let edge = self.edges.get(e).ok_or_else(|| Error::Value(format!("edge {e}")))?;
                if edge.factor != f || edge.variable != k {
                    return bad(format!("variable {k}: edge {e} does not connect factor {f}"));
                }
                if !self.factors[f].scope.contains(&k) {
                    return bad(format!("variable {k} lists factor {f} which excludes it"));
                }
            }
            let unary: Vec<_> = v
                .factor_neighbors
                .iter()
                .filter(|&&f| self.factors[f].kind == FactorKind::Unary)
                .collect();
            if unary.len() != 1 {
                return bad(format!("variable {k} has {} unary factors", unary.len()));
            }
        }
        let mut seen = BTreeSet::new();
        let mut edge_total = 0;
        for (id, f) in self.factors.iter().enumerate() {
            if f.id != id {
                return bad(format!("factor at index {id} has id {}", f.id));
            }
            match (f.scope.len(), f.kind) {
                (1, FactorKind::Unary) => {}
                (2, FactorKind::Pairwise) => {
                    if f.scope[0] >= f.scope[1] {
                        return bad(format!("factor {id}: scope not ascending"));
                    }
                    if !seen.insert((f.scope[0], f.scope[1])) {
                        return bad(format!("factor {id}: duplicate scope"));
                    }
                }
                _ => return bad(format!("factor {id}: scope length/kind mismatch")),
            }
            for (pos, &v) in f.scope.iter().enumerate() {
                if v >= n {
                    return bad(format!("factor {id}: variable {v} out of range"));
                }
                let e = f.edge_start + pos;
                if self.edges.get(e)
                    != Some(&Edge {
                        factor: id,
                        variable: v,
                        position: pos,
                    })
                {
                    return bad(format!("factor {id}: edge {e} inconsistent"));
                }
                if !self.variables[v].factor_neighbors.contains(&id) {
                    return bad(format!("factor {id}: variable {v} does not list it"));
                }
            }
            edge_total += f.scope.len();
        }
        if edge_total != self.edges.len() {
            return bad(format!(
                "edge count {} != sum of scope lengths {edge_total}",
                self.edges.len()
            ));
        }
        Ok(())
    }

    /// Pairwise-factor count for each variable.
    pub fn pairwise_degrees(&self) -> Vec<usize> {
        self.variables
            .iter()
            .map(|v| v.factor_neighbors.len() - 1)
            .collect()
    }

    /// Variable adjacency induced by pairwise factors.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vars()];
        for f in self.pairwise_factors() {
            adj[f.scope[0]].push(f.scope[1]);
            adj[f.scope[1]].push(f.scope[0]);
        }
        adj
    }

    pub fn stats(&self) -> GraphStats {
        let degrees = self.pairwise_degrees();
        let adj = self.neighbors();
        let n = self.n_vars();
        let mut diameter = 0;
        let mut disconnected = false;
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            for &d in &dist {
                if d == usize::MAX {
                    disconnected = true;
                } else {
                    diameter = diameter.max(d);
                }
            }
        }
        GraphStats {
            n_vars: n,
            n_unary: n,
            n_pairwise: self.n_pairwise(),
            min_degree: degrees.iter().copied().min().unwrap_or(0),
            max_degree: degrees.iter().copied().max().unwrap_or(0),
            diameter: (!disconnected).then_some(diameter),
            disconnected,
        }
    }

    /// True when the pairwise structure is a spanning tree.
    pub fn is_tree(&self) -> bool {
        let stats = self.stats();
        !stats.disconnected && self.n_pairwise() + 1 == self.n_vars()
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n_vars: self.n_vars(),
            names: self.names(),
            pairs: self.pairs().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn from_file(file: GraphFile) -> Result<Self> {
        if file.names.len() != file.n_vars {
            return Err(Error::Dimension(format!(
                "graph lists {} names for {} variables",
                file.names.len(),
                file.n_vars
            )));
        }
        if let Some(p) = file.pairs.iter().find(|p| p[0] >= p[1]) {
            return Err(Error::Value(format!("pair {p:?} is not ascending")));
        }
        let pairs: Vec<_> = file.pairs.iter().map(|p| (p[0], p[1])).collect();
        if pairs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Value("pairs are not in ascending order".into()));
        }
        FactorGraph::with_names(file.names, &pairs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        FactorGraph::from_file(serde_json::from_str(s)?)
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FactorGraph::from_json(&s)
    }
}

/// Symmetric matrix of Pearson correlations between label columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    /// Wraps a full `n×n` row-major matrix; symmetry is required.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Dimension(format!(
                "correlation matrix needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::Value(format!("correlation not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(CorrelationMatrix { n, values })
    }

    /// Builds a matrix with unit diagonal from upper-triangle entries.
    pub fn from_pairs(n: usize, entries: &[((usize, usize), f64)]) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        for &((i, j), c) in entries {
            if i >= n || j >= n || i == j {
                return Err(Error::out_of_range("pair", format!("({i}, {j})")));
            }
            values[i * n + j] = c;
            values[j * n + i] = c;
        }
        Ok(CorrelationMatrix { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Pearson correlation between label columns.
///
/// A constant column has zero variance; its off-diagonal entries are 0 and its
/// diagonal entry is 1.
pub fn compute_correlation(labels: &LabelMatrix) -> Result<CorrelationMatrix> {
    let (m, n) = (labels.rows(), labels.cols());
    if n == 0 || m < 2 {
        return Err(Error::Dimension(format!(
            "correlation needs at least 2 rows and 1 column, got {m}x{n}"
        )));
    }
    let mean: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| labels.get(i, j) as f64).sum::<f64>() / m as f64)
        .collect();
    let mut cov = vec![0.0; n * n];
    for i in 0..m {
        let row = labels.row(i);
        for a in 0..n {
            let da = row[a] as f64 - mean[a];
            for b in a..n {
                cov[a * n + b] += da * (row[b] as f64 - mean[b]);
            }
        }
    }
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        values[a * n + a] = 1.0;
        for b in a + 1..n {
            let (va, vb) = (cov[a * n + a], cov[b * n + b]);
            let c = if va > 0.0 && vb > 0.0 {
                (cov[a * n + b] / (va * vb).sqrt()).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            values[a * n + b] = c;
            values[b * n + a] = c;
        }
    }
    Ok(CorrelationMatrix { n, values })
}

/// Orders candidates by descending |corr|, ties by ascending index.
fn by_abs_desc<T: Ord + Copy>(a: (T, f64), b: (T, f64)) -> std::cmp::Ordering {
    b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0))
}

/// `min` policy: every variable pairs with its `k` most correlated others.
pub fn build_graph_min(corr: &CorrelationMatrix, k: usize) -> Result<FactorGraph> {
    let n = corr.n();
    if k == 0 || k + 1 > n {
        return Err(Error::out_of_range(
            "K",
            format!("K = {k} with {n} variables (need 1 <= K <= N-1)"),
        ));
    }
    let mut pairs = BTreeSet::new();
    for i in 0..n {
        let mut cands: Vec<(usize, f64)> =
            (0..n).filter(|&j| j != i).map(|j| (j, corr.get(i, j))).collect();
        cands.sort_by(|&a, &b| by_abs_desc(a, b));
        for &(j, _) in &cands[..k] {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let pairs: Vec<_> = pairs.into_iter().collect();
    FactorGraph::new(n, &pairs)
}

fn max_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Inverse of the row-major enumeration of pairs `i < j`.
fn pair_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
        i += 1;
    }
}

/// `rand` policy: `n_pairs` distinct pairs drawn uniformly without replacement.
pub fn build_graph_rand(n_vars: usize, n_pairs: usize, seed: u64) -> Result<FactorGraph> {
    let total = max_pairs(n_vars);
    if n_pairs > total {
        return Err(Error::out_of_range(
            "N_pairs",
            format!("{n_pairs} pairs requested, only {total} exist for {n_vars} variables"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<_> = index::sample(&mut rng, total, n_pairs)
        .into_iter()
        .map(|idx| pair_from_index(n_vars, idx))
        .collect();
    pairs.sort_unstable();
    FactorGraph::new(n_vars, &pairs)
}

/// `top` policy: the `n_pairs` globally most correlated pairs (by |corr|).
pub fn build_graph_top(corr: &CorrelationMatrix, n_pairs: usize) -> Result<FactorGraph> {
    let n = corr.n();
    let total = max_pairs(n);
    if n_pairs > total {
        return Err(Error::out_of_range(
            "N_pairs",
            format!("{n_pairs} pairs requested, only {total} exist for {n} variables"),
        ));
    }
    let mut cands: Vec<((usize, usize), f64)> = Vec::with_capacity(total);
    for i in 0..n {
        for j in i + 1..n {
            cands.push(((i, j), corr.get(i, j)));
        }
    }
    cands.sort_by(|&a, &b| by_abs_desc(a, b));
    let mut pairs: Vec<_> = cands[..n_pairs].iter().map(|&(p, _)| p).collect();
    pairs.sort_unstable();
    FactorGraph::new(n, &pairs)
}

/// Graph construction policy with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", deny_unknown_fields)]
pub enum GraphPolicy {
    Min { k: usize },
    Rand { n_pairs: usize, seed: u64 },
    Top { n_pairs: usize },
}

impl GraphPolicy {
    /// Parses `min`, `rand` or `top` with the policy parameter.
    pub fn parse(name: &str, param: usize, seed: u64) -> Result<Self> {
        match name {
            "min" => Ok(GraphPolicy::Min { k: param }),
            "rand" => Ok(GraphPolicy::Rand { n_pairs: param, seed }),
            "top" => Ok(GraphPolicy::Top { n_pairs: param }),
            other => Err(Error::Config(format!("unknown graph policy {other:?} (min|rand|top)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphPolicy::Min { .. } => "min",
            GraphPolicy::Rand { .. } => "rand",
            GraphPolicy::Top { .. } => "top",
        }
    }

    /// Builds the graph; `rand` ignores the label values.
    pub fn build(&self, labels: &LabelMatrix) -> Result<FactorGraph> {
        match *self {
            GraphPolicy::Min { k } => build_graph_min(&compute_correlation(labels)?, k),
            GraphPolicy::Rand { n_pairs, seed } => build_graph_rand(labels.cols(), n_pairs, seed),
            GraphPolicy::Top { n_pairs } => build_graph_top(&compute_correlation(labels)?, n_pairs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(cols: &[&[u8]]) -> LabelMatrix {
        let m = cols[0].len();
        let rows: Vec<Vec<u8>> = (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        LabelMatrix::from_rows(&rows).unwrap()
    }

    fn corr3() -> CorrelationMatrix {
        CorrelationMatrix::from_pairs(3, &[((0, 1), 0.9), ((0, 2), 0.5), ((1, 2), 0.1)]).unwrap()
    }

    #[test]
    fn correlation_examples() {
        let c = compute_correlation(&labels(&[&[1, 0, 1], &[1, 0, 1], &[0, 1, 0]])).unwrap();
        assert!((c.get(0, 1) - 1.0).abs() < 1e-12);
        assert!((c.get(0, 2) + 1.0).abs() < 1e-12);
        let c = compute_correlation(&labels(&[&[1, 1, 0, 0], &[1, 0, 1, 0]])).unwrap();
        assert_eq!(c.get(0, 1), 0.0);
    }

    #[test]
    fn correlation_constant_column() {
        let c = compute_correlation(&labels(&[&[1, 1, 1], &[1, 0, 1]])).unwrap();
        assert_eq!(c.get(0, 1), 0.0);
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(1, 1), 1.0);
    }

    #[test]
    fn correlation_errors() {
        assert!(matches!(
            compute_correlation(&labels(&[&[1]])),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            LabelMatrix::from_vec(2, 1, vec![0, 2]),
            Err(Error::Value(_))
        ));
    }

    #[test]
    fn min_policy_examples() {
        let g = build_graph_min(&corr3(), 2).unwrap();
        assert_eq!(g.pairs(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.n_factors(), 6);

        let g = build_graph_min(&corr3(), 1).unwrap();
        assert_eq!(g.pairs(), vec![(0, 1), (0, 2)]);

        let c2 = CorrelationMatrix::from_pairs(2, &[((0, 1), 0.3)]).unwrap();
        assert_eq!(build_graph_min(&c2, 1).unwrap().pairs(), vec![(0, 1)]);

        assert!(build_graph_min(&corr3(), 3).is_err());
        assert!(build_graph_min(&corr3(), 0).is_err());
    }

    #[test]
    fn min_policy_all_zero_uses_lexicographic_ties() {
        let c = CorrelationMatrix::from_pairs(4, &[]).unwrap();
        let g = build_graph_min(&c, 1).unwrap();
        // 0->1, 1->0, 2->0, 3->0
        assert_eq!(g.pairs(), vec![(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn top_policy_examples() {
        assert_eq!(build_graph_top(&corr3(), 2).unwrap().pairs(), vec![(0, 1), (0, 2)]);
        assert_eq!(build_graph_top(&corr3(), 3).unwrap().n_pairwise(), 3);
        assert_eq!(build_graph_top(&corr3(), 0).unwrap().n_pairwise(), 0);
        assert!(build_graph_top(&corr3(), 4).is_err());
    }

    #[test]
    fn top_policy_uses_absolute_value() {
        let c = CorrelationMatrix::from_pairs(4, &[((0, 1), 0.8), ((2, 3), -0.8)]).unwrap();
        let got = build_graph_top(&c, 2).unwrap().pairs();

        // brute force: rank all pairs by |corr| with a plain sort of tuples
        let mut all = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                all.push((-(c.get(i, j).abs() * 1e6) as i64, i, j));
            }
        }
        all.sort();
        let mut want: Vec<_> = all[..2].iter().map(|&(_, i, j)| (i, j)).collect();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(got, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn rand_policy_examples() {
        assert_eq!(build_graph_rand(2, 1, 123).unwrap().pairs(), vec![(0, 1)]);
        assert_eq!(build_graph_rand(10, 45, 9).unwrap().n_pairwise(), 45);
        let a = build_graph_rand(50, 100, 7).unwrap();
        let b = build_graph_rand(50, 100, 7).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.n_pairwise(), 100);
        assert!(build_graph_rand(4, 7, 0).is_err());
    }

    #[test]
    fn pair_index_round_trip() {
        let n = 7;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_from_index(n, k), (i, j));
                k += 1;
            }
        }
    }

    #[test]
    fn stats_examples() {
        let s = FactorGraph::new(3, &[]).unwrap().stats();
        assert_eq!(s.n_pairwise, 0);
        assert!(s.disconnected);
        assert_eq!(s.diameter, None);

        let tri = FactorGraph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap().stats();
        assert_eq!(tri.diameter, Some(1));
        assert_eq!((tri.min_degree, tri.max_degree), (2, 2));

        let path = FactorGraph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.stats().diameter, Some(3));
        assert!(path.is_tree());
    }

    #[test]
    fn graph_rejects_bad_pairs() {
        assert!(FactorGraph::new(3, &[(1, 1)]).is_err());
        assert!(FactorGraph::new(3, &[(0, 1), (1, 0)]).is_err());
        assert!(FactorGraph::new(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn json_round_trip_and_rejects_unsorted() {
        let g = build_graph_rand(12, 20, 3).unwrap();
        let s = g.to_json();
        let back = FactorGraph::from_json(&s).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), s);
        assert!(FactorGraph::from_json(r#"{"n_vars":3,"names":["a","b","c"],"pairs":[[1,2],[0,1]]}"#).is_err());
        assert!(FactorGraph::from_json(r#"{"n_vars":2,"names":["a","b"],"pairs":[[1,0]]}"#).is_err());
        assert!(FactorGraph::from_json(r#"{"n_vars":1,"names":["a"],"pairs":[],"x":1}"#).is_err());
    }

    #[test]
    fn edge_layout() {
        let g = FactorGraph::new(3, &[(0, 2)]).unwrap();
        g.validate().unwrap();
        assert_eq!(g.n_edges(), 5);
        assert_eq!(g.factors()[3].edge_start, 3);
        assert_eq!(g.variables()[2].edges, vec![2, 4]);
    }
}
