//! Unrolled flooding-schedule sum-product with exact reverse-mode gradients.
//!
//! Messages live in the linear domain. Each round first recomputes every
//! factor-to-variable message from the previous round's variable-to-factor
//! messages, then every variable-to-factor message from the fresh
//! factor-to-variable messages. Variable-to-factor messages and beliefs are
//! normalised to sum to one; a sum below `epsilon` is replaced by the uniform
//! message, and that clamp contributes no gradient.
//!
//! Unary factors ignore their incoming messages, so their outgoing message is
//! the same at every round. By default that message is also used in place of
//! the all-ones start before round one (`prime_unary`); with it, a tree of
//! variable diameter `d` is exact after `d` rounds instead of `d + 1`.
//!
//! The forward pass can record a [`Tape`] holding every intermediate message
//! so that [`backward_sum_product`] can differentiate the marginals with
//! respect to every table entry at every round.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FactorGraph, FactorKind};
use crate::potentials::PotentialTable;

pub type Msg = [f64; 2];

const UNIFORM: Msg = [0.5, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sharing {
    /// One table set reused by every round.
    #[default]
    Shared,
    /// A separate table set per round.
    Independent,
}

impl std::str::FromStr for Sharing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared" => Ok(Sharing::Shared),
            "independent" => Ok(Sharing::Independent),
            _ => Err(Error::Config(format!("unknown sharing mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InferenceConfig {
    pub iterations: usize,
    pub epsilon: f64,
    pub sharing: Sharing,
    pub prime_unary: bool,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            iterations: 2,
            epsilon: 1e-12,
            sharing: Sharing::Shared,
            prime_unary: true,
        }
    }
}

impl InferenceConfig {
    pub fn new(iterations: usize, sharing: Sharing) -> Self {
        InferenceConfig {
            iterations,
            sharing,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::out_of_range("iterations", "T must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1e-3) {
            return Err(Error::out_of_range(
                "epsilon",
                format!("{} not in (0, 1e-3]", self.epsilon),
            ));
        }
        Ok(())
    }

    /// Number of table sets the model must supply.
    pub fn table_sets(&self) -> usize {
        match self.sharing {
            Sharing::Shared => 1,
            Sharing::Independent => self.iterations,
        }
    }
}

/// Potential tables for every factor of one graph, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    offsets: Vec<usize>,
    values: Vec<f64>,
}

impl TableSet {
    /// Every entry set to `value`.
    pub fn filled(graph: &FactorGraph, value: f64) -> Self {
        let mut offsets = Vec::with_capacity(graph.n_factors() + 1);
        let mut len = 0;
        for f in graph.factors() {
            offsets.push(len);
            len += f.n_states();
        }
        offsets.push(len);
        TableSet {
            offsets,
            values: vec![value; len],
        }
    }

    pub fn zeros(graph: &FactorGraph) -> Self {
        Self::filled(graph, 0.0)
    }

    /// One table per factor, in factor id order.
    pub fn from_tables(graph: &FactorGraph, tables: &[PotentialTable]) -> Result<Self> {
        if tables.len() != graph.n_factors() {
            return Err(Error::Dimension(format!(
                "{} tables for {} factors",
                tables.len(),
                graph.n_factors()
            )));
        }
        let mut set = Self::zeros(graph);
        for (f, t) in tables.iter().enumerate() {
            let dst = set.table_mut(f);
            if dst.len() != t.values.len() {
                return Err(Error::Dimension(format!(
                    "factor {f} needs {} entries, table has {}",
                    dst.len(),
                    t.values.len()
                )));
            }
            dst.copy_from_slice(&t.values);
        }
        Ok(set)
    }

    pub fn n_factors(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn table(&self, f: usize) -> &[f64] {
        &self.values[self.offsets[f]..self.offsets[f + 1]]
    }

    pub fn table_mut(&mut self, f: usize) -> &mut [f64] {
        &mut self.values[self.offsets[f]..self.offsets[f + 1]]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn matches(&self, graph: &FactorGraph) -> bool {
        self.n_factors() == graph.n_factors()
            && graph
                .factors()
                .iter()
                .all(|f| self.offsets[f.id + 1] - self.offsets[f.id] == f.n_states())
    }

    fn check(&self, graph: &FactorGraph) -> Result<()> {
        if self.matches(graph) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "table set covers {} factors, graph has {} (or shapes differ)",
                self.n_factors(),
                graph.n_factors()
            )))
        }
    }

    fn add_assign(&mut self, other: &TableSet) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }
}

/// Per-edge messages for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    pub f2v: Vec<Msg>,
    pub v2f: Vec<Msg>,
}

/// Approximate marginals `[p(x=0), p(x=1)]` per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub beliefs: Vec<Msg>,
}

impl Marginals {
    pub fn len(&self) -> usize {
        self.beliefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beliefs.is_empty()
    }

    /// `p(x_i = 1)`.
    pub fn p(&self, i: usize) -> f64 {
        self.beliefs[i][1]
    }

    pub fn probs(&self) -> Vec<f64> {
        self.beliefs.iter().map(|b| b[1]).collect()
    }
}

/// Normalises `u` in place; returns false (and sets uniform) when floored.
fn normalize(u: Msg, epsilon: f64) -> (Msg, f64, bool) {
    let s = u[0] + u[1];
    if s < epsilon || !s.is_finite() {
        (UNIFORM, s, true)
    } else {
        ([u[0] / s, u[1] / s], s, false)
    }
}

/// `out[k] = Π_{j != k} ms[j]`, elementwise per state.
pub fn exclusive_products(ms: &[Msg], out: &mut [Msg]) {
    let d = ms.len();
    let mut acc = [1.0, 1.0];
    for k in 0..d {
        out[k] = acc;
        acc = [acc[0] * ms[k][0], acc[1] * ms[k][1]];
    }
    let mut acc = [1.0, 1.0];
    for k in (0..d).rev() {
        out[k] = [out[k][0] * acc[0], out[k][1] * acc[1]];
        acc = [acc[0] * ms[k][0], acc[1] * ms[k][1]];
    }
}

/// Adds the gradient of `Σ_k <upstream[k], exclusive_products(ms)[k]>`
/// with respect to each `ms[j]` into `grad`. Linear in the degree and free of
/// divisions, so zero messages are handled exactly.
pub fn exclusive_products_backward(ms: &[Msg], upstream: &[Msg], grad: &mut [Msg]) {
    let d = ms.len();
    for x in 0..2 {
        // suffix[j] = Π_{k >= j} ms[k]
        let mut suffix = vec![1.0; d + 1];
        for j in (0..d).rev() {
            suffix[j] = suffix[j + 1] * ms[j][x];
        }
        // left sweep: terms with k < j
        let mut a = 0.0;
        let mut prefix = 1.0;
        for j in 0..d {
            grad[j][x] += a * suffix[j + 1];
            a = a * ms[j][x] + upstream[j][x] * prefix;
            prefix *= ms[j][x];
        }
        // right sweep: terms with k > j
        let mut b = 0.0;
        let mut prefix_before = vec![1.0; d];
        for j in 1..d {
            prefix_before[j] = prefix_before[j - 1] * ms[j - 1][x];
        }
        for j in (0..d).rev() {
            grad[j][x] += prefix_before[j] * b;
            b = b * ms[j][x] + upstream[j][x] * suffix[j + 1];
        }
    }
}

/// All factor-to-variable messages set to one; variable-to-factor messages
/// follow from a single normalisation and are uniform.
pub fn init_messages(graph: &FactorGraph) -> MessageState {
    MessageState {
        f2v: vec![[1.0, 1.0]; graph.n_edges()],
        v2f: vec![UNIFORM; graph.n_edges()],
    }
}

/// Flooding factor-to-variable update from the current variable-to-factor
/// messages.
pub fn step_factor_to_variable(
    graph: &FactorGraph,
    tables: &TableSet,
    state: &mut MessageState,
) -> Result<()> {
    tables.check(graph)?;
    factor_to_variable(graph, tables, &state.v2f, &mut state.f2v);
    Ok(())
}

fn factor_to_variable(graph: &FactorGraph, tables: &TableSet, v2f: &[Msg], f2v: &mut [Msg]) {
    for f in graph.factors() {
        let phi = tables.table(f.id);
        let e = f.edge_start;
        match f.kind {
            FactorKind::Unary => f2v[e] = [phi[0], phi[1]],
            FactorKind::Pairwise => {
                let qa = v2f[e];
                let qb = v2f[e + 1];
                f2v[e] = [
                    phi[0] * qb[0] + phi[1] * qb[1],
                    phi[2] * qb[0] + phi[3] * qb[1],
                ];
                f2v[e + 1] = [
                    phi[0] * qa[0] + phi[2] * qa[1],
                    phi[1] * qa[0] + phi[3] * qa[1],
                ];
            }
        }
    }
}

/// Variable-to-factor update from the current factor-to-variable messages.
pub fn step_variable_to_factor(graph: &FactorGraph, state: &mut MessageState, epsilon: f64) {
    variable_to_factor(graph, &state.f2v, &mut state.v2f, epsilon, None);
}

fn variable_to_factor(
    graph: &FactorGraph,
    f2v: &[Msg],
    v2f: &mut [Msg],
    epsilon: f64,
    mut floored: Option<&mut Vec<bool>>,
) {
    let mut ms = Vec::new();
    let mut out = Vec::new();
    for v in graph.variables() {
        ms.clear();
        ms.extend(v.edges.iter().map(|&e| f2v[e]));
        out.resize(ms.len(), [0.0; 2]);
        exclusive_products(&ms, &mut out);
        for (k, &e) in v.edges.iter().enumerate() {
            let (q, _, fl) = normalize(out[k], epsilon);
            v2f[e] = q;
            if let Some(flags) = floored.as_deref_mut() {
                flags[e] = fl;
            }
        }
    }
}

/// Beliefs from the product of all incoming factor-to-variable messages.
pub fn read_marginals(graph: &FactorGraph, state: &MessageState, epsilon: f64) -> Marginals {
    beliefs(graph, &state.f2v, epsilon).0
}

fn beliefs(graph: &FactorGraph, f2v: &[Msg], epsilon: f64) -> (Marginals, Vec<bool>) {
    let mut out = Vec::with_capacity(graph.n_vars());
    let mut floored = Vec::with_capacity(graph.n_vars());
    for v in graph.variables() {
        let mut b = [1.0, 1.0];
        for &e in &v.edges {
            b[0] *= f2v[e][0];
            b[1] *= f2v[e][1];
        }
        let (q, _, fl) = normalize(b, epsilon);
        out.push(q);
        floored.push(fl);
    }
    (Marginals { beliefs: out }, floored)
}

/// Replaces the starting unary messages by the round-one unary tables and
/// recomputes the starting variable-to-factor messages.
fn prime_unary(
    graph: &FactorGraph,
    tables: &TableSet,
    state: &mut MessageState,
    epsilon: f64,
    floored: Option<&mut Vec<bool>>,
) {
    for v in graph.variables() {
        let f = graph.unary_factor(v.id);
        let phi = tables.table(f);
        state.f2v[graph.factors()[f].edge_start] = [phi[0], phi[1]];
    }
    variable_to_factor(graph, &state.f2v, &mut state.v2f, epsilon, floored);
}

fn layout_id(graph: &FactorGraph) -> u64 {
    let mut h = DefaultHasher::new();
    graph.n_vars().hash(&mut h);
    graph.pairs().hash(&mut h);
    h.finish()
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct Tape {
    layout: u64,
    config: InferenceConfig,
    tables: Vec<TableSet>,
    /// `v2f[t]` is the input of round `t + 1`, for `t` in `0..T`.
    v2f: Vec<Vec<Msg>>,
    v2f_floored: Vec<Vec<bool>>,
    /// `f2v[t]` is the output of round `t + 1`.
    f2v: Vec<Vec<Msg>>,
    /// Messages `v2f[0]` was computed from.
    f2v_init: Vec<Msg>,
    marginals: Marginals,
    marginal_floored: Vec<bool>,
}

impl Tape {
    pub fn marginals(&self) -> &Marginals {
        &self.marginals
    }

    pub fn config(&self) -> &InferenceConfig {
        &self.config
    }

    /// Factor-to-variable messages after each round.
    pub fn f2v_rounds(&self) -> &[Vec<Msg>] {
        &self.f2v
    }
}

fn check_tables(graph: &FactorGraph, tables: &[TableSet], config: &InferenceConfig) -> Result<()> {
    config.validate()?;
    if tables.len() != config.table_sets() {
        return Err(Error::Dimension(format!(
            "{:?} sharing with T = {} needs {} table sets, got {}",
            config.sharing,
            config.iterations,
            config.table_sets(),
            tables.len()
        )));
    }
    tables.iter().try_for_each(|t| t.check(graph))
}

fn tables_at(tables: &[TableSet], round: usize) -> &TableSet {
    &tables[round.min(tables.len() - 1)]
}

/// Forward pass without a tape.
pub fn marginals(
    graph: &FactorGraph,
    tables: &[TableSet],
    config: &InferenceConfig,
) -> Result<Marginals> {
    check_tables(graph, tables, config)?;
    let mut state = init_messages(graph);
    if config.prime_unary {
        prime_unary(graph, &tables[0], &mut state, config.epsilon, None);
    }
    for t in 0..config.iterations {
        factor_to_variable(graph, tables_at(tables, t), &state.v2f, &mut state.f2v);
        variable_to_factor(graph, &state.f2v, &mut state.v2f, config.epsilon, None);
    }
    Ok(read_marginals(graph, &state, config.epsilon))
}

/// Runs `T` rounds and records everything needed for the backward pass.
///
/// `tables` holds one set in shared mode and `T` sets in independent mode,
/// where round `t` (0-based) uses `tables[t]`.
pub fn run_sum_product(
    graph: &FactorGraph,
    tables: &[TableSet],
    config: &InferenceConfig,
) -> Result<(Marginals, Tape)> {
    check_tables(graph, tables, config)?;
    let n_edges = graph.n_edges();
    let mut state = init_messages(graph);
    let mut floored = vec![false; n_edges];
    if config.prime_unary {
        prime_unary(graph, &tables[0], &mut state, config.epsilon, Some(&mut floored));
    }
    let f2v_init = state.f2v.clone();
    let mut v2f_hist = Vec::with_capacity(config.iterations);
    let mut floored_hist = Vec::with_capacity(config.iterations);
    let mut f2v_hist = Vec::with_capacity(config.iterations);
    for t in 0..config.iterations {
        factor_to_variable(graph, tables_at(tables, t), &state.v2f, &mut state.f2v);
        v2f_hist.push(state.v2f.clone());
        floored_hist.push(floored.clone());
        variable_to_factor(
            graph,
            &state.f2v,
            &mut state.v2f,
            config.epsilon,
            Some(&mut floored),
        );
        f2v_hist.push(state.f2v.clone());
    }
    let (marg, marginal_floored) = beliefs(graph, &state.f2v, config.epsilon);
    let tape = Tape {
        layout: layout_id(graph),
        config: *config,
        tables: tables.to_vec(),
        v2f: v2f_hist,
        v2f_floored: floored_hist,
        f2v: f2v_hist,
        f2v_init,
        marginals: marg.clone(),
        marginal_floored,
    };
    Ok((marg, tape))
}

/// Gradient of a normalisation `q = u / Σu` given `dL/dq`.
fn normalize_backward(q: Msg, s: f64, gq: Msg) -> Msg {
    let dot = gq[0] * q[0] + gq[1] * q[1];
    [(gq[0] - dot) / s, (gq[1] - dot) / s]
}

/// Reverse pass: `dL/dtable` for every table set, given `dL/dp(x_i = 1)`.
pub fn backward_sum_product(
    graph: &FactorGraph,
    tape: &Tape,
    grad_marginals: &[f64],
) -> Result<Vec<TableSet>> {
    if tape.layout != layout_id(graph) || tape.f2v.first().is_some_and(|m| m.len() != graph.n_edges())
    {
        return Err(Error::TapeMismatch("graph differs from the forward pass".into()));
    }
    if grad_marginals.len() != graph.n_vars() {
        return Err(Error::Dimension(format!(
            "{} marginal gradients for {} variables",
            grad_marginals.len(),
            graph.n_vars()
        )));
    }
    let n_edges = graph.n_edges();
    let t_max = tape.config.iterations;
    let mut grads: Vec<TableSet> = tape.tables.iter().map(|_| TableSet::zeros(graph)).collect();
    let mut round_grad = TableSet::zeros(graph);

    // beliefs -> final factor-to-variable messages
    let mut g_f2v = vec![[0.0; 2]; n_edges];
    let f2v_last = &tape.f2v[t_max - 1];
    let mut ms = Vec::new();
    let mut excl = Vec::new();
    let mut gu = Vec::new();
    for v in graph.variables() {
        if tape.marginal_floored[v.id] || grad_marginals[v.id] == 0.0 {
            continue;
        }
        ms.clear();
        ms.extend(v.edges.iter().map(|&e| f2v_last[e]));
        excl.resize(ms.len(), [0.0; 2]);
        exclusive_products(&ms, &mut excl);
        let u = [
            excl[0][0] * ms[0][0],
            excl[0][1] * ms[0][1],
        ];
        let s = u[0] + u[1];
        let gb = normalize_backward(tape.marginals.beliefs[v.id], s, [0.0, grad_marginals[v.id]]);
        for (k, &e) in v.edges.iter().enumerate() {
            g_f2v[e] = [gb[0] * excl[k][0], gb[1] * excl[k][1]];
        }
    }

    let mut g_v2f = vec![[0.0; 2]; n_edges];
    for t in (0..t_max).rev() {
        let tables = tables_at(&tape.tables, t);
        let q = &tape.v2f[t];
        round_grad.values_mut().iter_mut().for_each(|x| *x = 0.0);
        g_v2f.iter_mut().for_each(|g| *g = [0.0; 2]);

        for f in graph.factors() {
            let e = f.edge_start;
            let gphi = round_grad.table_mut(f.id);
            match f.kind {
                FactorKind::Unary => {
                    gphi[0] += g_f2v[e][0];
                    gphi[1] += g_f2v[e][1];
                }
                FactorKind::Pairwise => {
                    let phi = tables.table(f.id);
                    let (qa, qb) = (q[e], q[e + 1]);
                    let (ga, gb) = (g_f2v[e], g_f2v[e + 1]);
                    for xa in 0..2 {
                        for xb in 0..2 {
                            let i = xa * 2 + xb;
                            gphi[i] += ga[xa] * qb[xb] + gb[xb] * qa[xa];
                            g_v2f[e + 1][xb] += ga[xa] * phi[i];
                            g_v2f[e][xa] += gb[xb] * phi[i];
                        }
                    }
                }
            }
        }
        let slot = t.min(grads.len() - 1);
        grads[slot].add_assign(&round_grad);

        if t == 0 && !tape.config.prime_unary {
            break;
        }
        // v2f[t] was produced from f2v[t - 1] (or the primed start) by
        // exclusive product and normalisation
        let f2v_prev = if t == 0 { &tape.f2v_init } else { &tape.f2v[t - 1] };
        let floored = &tape.v2f_floored[t];
        g_f2v.iter_mut().for_each(|g| *g = [0.0; 2]);
        for v in graph.variables() {
            ms.clear();
            ms.extend(v.edges.iter().map(|&e| f2v_prev[e]));
            excl.resize(ms.len(), [0.0; 2]);
            exclusive_products(&ms, &mut excl);
            gu.clear();
            for (k, &e) in v.edges.iter().enumerate() {
                if floored[e] {
                    gu.push([0.0; 2]);
                } else {
                    let s = excl[k][0] + excl[k][1];
                    gu.push(normalize_backward(q[e], s, g_v2f[e]));
                }
            }
            let mut gm = vec![[0.0; 2]; ms.len()];
            exclusive_products_backward(&ms, &gu, &mut gm);
            for (k, &e) in v.edges.iter().enumerate() {
                g_f2v[e] = gm[k];
            }
        }
        if t == 0 {
            // only the primed unary messages depend on parameters
            for v in graph.variables() {
                let f = graph.unary_factor(v.id);
                let e = graph.factors()[f].edge_start;
                let g = grads[0].table_mut(f);
                g[0] += g_f2v[e][0];
                g[1] += g_f2v[e][1];
            }
        }
    }
    Ok(grads)
}
