//! The three classifier variants and their end-to-end gradients.
//!
//! - `sigmoid`: independent logistic regression per attribute.
//! - `const_crf`: softplus-linear unary heads, softplus-constant pairwise heads.
//! - `linear_crf`: softplus-linear heads on every factor.
//!
//! Features pass through an optional trainable `tanh(W z + b)` layer before
//! reaching the heads; by default the map is the identity.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FactorGraph, FactorKind};
use crate::inference::{self, InferenceConfig, Marginals, TableSet};
use crate::potentials::{logistic, HeadKind, PotentialHead};
use crate::trainer::loss::{bce_grad, bce_loss};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Sigmoid,
    ConstCrf,
    #[default]
    LinearCrf,
}

impl ModelKind {
    pub fn is_crf(self) -> bool {
        self != ModelKind::Sigmoid
    }

    fn pairwise_head(self) -> HeadKind {
        match self {
            ModelKind::LinearCrf => HeadKind::SoftplusLinear,
            _ => HeadKind::SoftplusConst,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Sigmoid => "sigmoid",
            ModelKind::ConstCrf => "const_crf",
            ModelKind::LinearCrf => "linear_crf",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(ModelKind::Sigmoid),
            "const_crf" => Ok(ModelKind::ConstCrf),
            "linear_crf" => Ok(ModelKind::LinearCrf),
            _ => Err(Error::Config(format!("unknown model kind '{s}'"))),
        }
    }
}

/// `out = W x + b` with `W` stored `out_dim × in_dim`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl AffineLayer {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        AffineLayer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    fn init<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let mut l = Self::zeros(in_dim, out_dim);
        let s = 1.0 / (in_dim.max(1) as f64).sqrt();
        l.weights.iter_mut().for_each(|w| *w = rng.random_range(-s..=s));
        l
    }

    fn validate(&self) -> Result<()> {
        if self.weights.len() != self.in_dim * self.out_dim || self.biases.len() != self.out_dim {
            return Err(Error::Dimension(format!(
                "{}x{} layer has {} weights and {} biases",
                self.out_dim,
                self.in_dim,
                self.weights.len(),
                self.biases.len()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.out_dim)
            .map(|o| {
                let w = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
                w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.biases[o]
            })
            .collect()
    }

    /// Accumulates parameter gradients into `grad` and input gradients into `gx`.
    fn backward(&self, x: &[f64], g_out: &[f64], grad: &mut AffineLayer, gx: &mut [f64]) {
        for o in 0..self.out_dim {
            let g = g_out[o];
            if g == 0.0 {
                continue;
            }
            grad.biases[o] += g;
            let row = o * self.in_dim..(o + 1) * self.in_dim;
            for ((gw, w), (&xi, gxi)) in grad.weights[row.clone()]
                .iter_mut()
                .zip(&self.weights[row])
                .zip(x.iter().zip(gx.iter_mut()))
            {
                *gw += g * xi;
                *gxi += g * w;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum FeatureMap {
    Identity,
    Tanh { layer: AffineLayer },
}

/// Every trainable parameter of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub feature: Option<AffineLayer>,
    pub sigmoid: Option<AffineLayer>,
    /// `heads[set][factor]`; one set when shared, `T` when independent.
    pub heads: Vec<Vec<PotentialHead>>,
}

impl Params {
    fn slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for l in self.feature.iter().chain(&self.sigmoid) {
            out.push(&l.weights);
            out.push(&l.biases);
        }
        for h in self.heads.iter().flatten() {
            out.push(&h.weights);
            out.push(&h.biases);
        }
        out
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in self.feature.iter_mut().chain(&mut self.sigmoid) {
            out.push(&mut l.weights);
            out.push(&mut l.biases);
        }
        for h in self.heads.iter_mut().flatten() {
            out.push(&mut h.weights);
            out.push(&mut h.biases);
        }
        out
    }

    pub fn n_params(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    /// Feature layer, sigmoid layer, then heads by set and factor; weights
    /// before biases within each block.
    pub fn flatten(&self) -> Vec<f64> {
        self.slices().concat()
    }

    pub fn load(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Dimension(format!(
                "{} values for {} parameters",
                flat.len(),
                self.n_params()
            )));
        }
        let mut at = 0;
        for s in self.slices_mut() {
            s.copy_from_slice(&flat[at..at + s.len()]);
            at += s.len();
        }
        Ok(())
    }

    pub fn zeros_like(&self) -> Params {
        let mut p = self.clone();
        for s in p.slices_mut() {
            s.iter_mut().for_each(|v| *v = 0.0);
        }
        p
    }
}

/// Loss and gradients for a single sample.
#[derive(Debug, Clone)]
pub struct SampleGrad {
    pub loss: f64,
    pub params: Params,
    /// Gradient with respect to the raw input features.
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    kind: ModelKind,
    input_dim: usize,
    n_attrs: usize,
    graph: Option<Arc<FactorGraph>>,
    inference: InferenceConfig,
    pub params: Params,
}

/// How a fresh model's parameters are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Zeros,
    Uniform { seed: u64 },
}

impl Model {
    /// Builds a model. CRF kinds require a graph over `n_attrs` variables;
    /// the sigmoid kind ignores `graph`. `hidden_dim` adds a trainable
    /// `tanh` feature layer of that width.
    pub fn new(
        kind: ModelKind,
        n_attrs: usize,
        input_dim: usize,
        graph: Option<Arc<FactorGraph>>,
        inference: InferenceConfig,
        hidden_dim: Option<usize>,
        init: Init,
    ) -> Result<Self> {
        inference.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(match init {
            Init::Zeros => 0,
            Init::Uniform { seed } => seed,
        });
        let zero = init == Init::Zeros;
        let feature = hidden_dim.map(|h| {
            if zero {
                AffineLayer::zeros(input_dim, h)
            } else {
                AffineLayer::init(input_dim, h, &mut rng)
            }
        });
        let dim = hidden_dim.unwrap_or(input_dim);

        let (graph, sigmoid, heads) = if kind.is_crf() {
            let graph = graph.ok_or_else(|| {
                Error::Config(format!("model kind {kind} requires a factor graph"))
            })?;
            if graph.n_vars() != n_attrs {
                return Err(Error::Dimension(format!(
                    "graph has {} variables, data has {n_attrs} attributes",
                    graph.n_vars()
                )));
            }
            let mut set = Vec::with_capacity(graph.n_factors());
            for f in graph.factors() {
                let (hk, n_states) = match f.kind {
                    FactorKind::Unary => (HeadKind::SoftplusLinear, 2),
                    FactorKind::Pairwise => (kind.pairwise_head(), 4),
                };
                set.push(if zero {
                    PotentialHead::zeros(hk, n_states, dim)?
                } else {
                    PotentialHead::init_with(hk, n_states, dim, &mut rng)?
                });
            }
            // every round starts from the same draw
            let heads = vec![set; inference.table_sets()];
            (Some(graph), None, heads)
        } else {
            let layer = if zero {
                AffineLayer::zeros(dim, n_attrs)
            } else {
                AffineLayer::init(dim, n_attrs, &mut rng)
            };
            (None, Some(layer), Vec::new())
        };

        Ok(Model {
            kind,
            input_dim,
            n_attrs,
            graph,
            inference,
            params: Params {
                feature,
                sigmoid,
                heads,
            },
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn graph(&self) -> Option<&FactorGraph> {
        self.graph.as_deref()
    }

    pub fn inference(&self) -> &InferenceConfig {
        &self.inference
    }

    fn feature_dim(&self) -> usize {
        self.params.feature.as_ref().map_or(self.input_dim, |l| l.out_dim)
    }

    fn check_input(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "model expects {} features, got {}",
                self.input_dim,
                z.len()
            )));
        }
        Ok(())
    }

    fn features(&self, z: &[f64]) -> Vec<f64> {
        match &self.params.feature {
            None => z.to_vec(),
            Some(l) => l.forward(z).into_iter().map(f64::tanh).collect(),
        }
    }

    /// Potential tables for every set, evaluated at mapped features `h`.
    pub fn tables(&self, h: &[f64]) -> Result<Vec<TableSet>> {
        let graph = self.graph.as_deref().expect("CRF model has a graph");
        self.params
            .heads
            .iter()
            .map(|set| {
                let mut t = TableSet::zeros(graph);
                for (f, head) in set.iter().enumerate() {
                    head.eval_into(h, t.table_mut(f))?;
                }
                Ok(t)
            })
            .collect()
    }

    fn sigmoid_probs(&self, h: &[f64]) -> Vec<f64> {
        let l = self.params.sigmoid.as_ref().expect("sigmoid model has a layer");
        l.forward(h).into_iter().map(logistic).collect()
    }

    /// Marginals `p(x_i = 1 | z)`.
    pub fn predict(&self, z: &[f64]) -> Result<Marginals> {
        self.check_input(z)?;
        let h = self.features(z);
        if self.kind.is_crf() {
            let graph = self.graph.as_deref().expect("CRF model has a graph");
            inference::marginals(graph, &self.tables(&h)?, &self.inference)
        } else {
            Ok(Marginals {
                beliefs: self.sigmoid_probs(&h).into_iter().map(|p| [1.0 - p, p]).collect(),
            })
        }
    }

    pub fn loss(&self, z: &[f64], y: &[u8]) -> Result<f64> {
        Ok(bce_loss(&self.predict(z)?.probs(), y))
    }

    /// BCE loss and its gradient with respect to every parameter and `z`.
    pub fn sample_grad(&self, z: &[f64], y: &[u8]) -> Result<SampleGrad> {
        self.check_input(z)?;
        if y.len() != self.n_attrs {
            return Err(Error::Dimension(format!(
                "{} labels for {} attributes",
                y.len(),
                self.n_attrs
            )));
        }
        let h = self.features(z);
        let mut grad = self.params.zeros_like();
        let mut gh = vec![0.0; self.feature_dim()];

        let loss = if self.kind.is_crf() {
            let graph = self.graph.as_deref().expect("CRF model has a graph");
            let tables = self.tables(&h)?;
            let (marg, tape) = inference::run_sum_product(graph, &tables, &self.inference)?;
            let p = marg.probs();
            let gp = bce_grad(&p, y);
            let gtables = inference::backward_sum_product(graph, &tape, &gp)?;
            for ((set, gset), gt) in self.params.heads.iter().zip(&mut grad.heads).zip(&gtables) {
                for (f, (head, ghead)) in set.iter().zip(gset.iter_mut()).enumerate() {
                    head.backward_accumulate(
                        &h,
                        gt.table(f),
                        &mut ghead.weights,
                        &mut ghead.biases,
                        &mut gh,
                    )?;
                }
            }
            bce_loss(&p, y)
        } else {
            let p = self.sigmoid_probs(&h);
            let ga: Vec<f64> = bce_grad(&p, y)
                .iter()
                .zip(&p)
                .map(|(g, p)| g * p * (1.0 - p))
                .collect();
            let layer = self.params.sigmoid.as_ref().expect("sigmoid layer");
            layer.backward(&h, &ga, grad.sigmoid.as_mut().expect("sigmoid grad"), &mut gh);
            bce_loss(&p, y)
        };

        let gz = match &self.params.feature {
            None => gh,
            Some(layer) => {
                let gpre: Vec<f64> = gh.iter().zip(&h).map(|(g, t)| g * (1.0 - t * t)).collect();
                let mut gz = vec![0.0; self.input_dim];
                layer.backward(z, &gpre, grad.feature.as_mut().expect("feature grad"), &mut gz);
                gz
            }
        };
        Ok(SampleGrad {
            loss,
            params: grad,
            z: gz,
        })
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        let heads = self
            .params
            .heads
            .iter()
            .enumerate()
            .flat_map(|(it, set)| {
                set.iter().enumerate().map(move |(f, h)| HeadEntry {
                    factor: f,
                    iteration: it,
                    kind: h.kind,
                    n_states: h.n_states,
                    dim: h.dim,
                    weights: h.weights.clone(),
                    biases: h.biases.clone(),
                })
            })
            .collect();
        Checkpoint {
            model: self.kind,
            n_attrs: self.n_attrs,
            input_dim: self.input_dim,
            inference: self.inference,
            graph_hash: self.graph.as_ref().map(|g| g.content_hash()),
            feature_map: match &self.params.feature {
                None => FeatureMap::Identity,
                Some(l) => FeatureMap::Tanh { layer: l.clone() },
            },
            sigmoid: self.params.sigmoid.clone(),
            heads,
        }
    }

    /// Rebuilds a model; CRF checkpoints need the graph they were trained on.
    pub fn from_checkpoint(ck: Checkpoint, graph: Option<Arc<FactorGraph>>) -> Result<Self> {
        ck.inference.validate()?;
        let feature = match ck.feature_map {
            FeatureMap::Identity => None,
            FeatureMap::Tanh { layer } => {
                layer.validate()?;
                if layer.in_dim != ck.input_dim {
                    return Err(Error::Dimension("feature layer input width".into()));
                }
                Some(layer)
            }
        };
        let dim = feature.as_ref().map_or(ck.input_dim, |l| l.out_dim);
        if !ck.model.is_crf() {
            let layer = ck
                .sigmoid
                .ok_or_else(|| Error::Config("sigmoid checkpoint without a layer".into()))?;
            layer.validate()?;
            if layer.in_dim != dim || layer.out_dim != ck.n_attrs {
                return Err(Error::Dimension("sigmoid layer shape".into()));
            }
            return Ok(Model {
                kind: ck.model,
                input_dim: ck.input_dim,
                n_attrs: ck.n_attrs,
                graph: None,
                inference: ck.inference,
                params: Params {
                    feature,
                    sigmoid: Some(layer),
                    heads: Vec::new(),
                },
            });
        }

        let graph = graph
            .ok_or_else(|| Error::Config(format!("{} checkpoint requires its graph file", ck.model)))?;
        if ck.graph_hash.as_deref() != Some(graph.content_hash().as_str()) {
            return Err(Error::Config(
                "graph does not match the one the checkpoint was trained against".into(),
            ));
        }
        let sets = ck.inference.table_sets();
        let mut template = Model::new(
            ck.model,
            ck.n_attrs,
            ck.input_dim,
            Some(graph),
            ck.inference,
            feature.as_ref().map(|l| l.out_dim),
            Init::Zeros,
        )?;
        if ck.heads.len() != sets * template.graph.as_ref().map_or(0, |g| g.n_factors()) {
            return Err(Error::Dimension(format!(
                "checkpoint has {} heads, model needs {}",
                ck.heads.len(),
                template.params.heads.iter().map(Vec::len).sum::<usize>()
            )));
        }
        for e in ck.heads {
            let slot = template
                .params
                .heads
                .get_mut(e.iteration)
                .and_then(|s| s.get_mut(e.factor))
                .ok_or_else(|| {
                    Error::Dimension(format!("head ({}, {}) out of range", e.factor, e.iteration))
                })?;
            let head = PotentialHead {
                kind: e.kind,
                n_states: e.n_states,
                dim: e.dim,
                weights: e.weights,
                biases: e.biases,
            };
            head.validate()?;
            if head.kind != slot.kind || head.n_states != slot.n_states || head.dim != dim {
                return Err(Error::Dimension(format!(
                    "head for factor {} has the wrong kind or shape",
                    e.factor
                )));
            }
            *slot = head;
        }
        template.params.feature = feature;
        Ok(template)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadEntry {
    pub factor: usize,
    pub iteration: usize,
    pub kind: HeadKind,
    pub n_states: usize,
    pub dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Serialized model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub model: ModelKind,
    pub n_attrs: usize,
    pub input_dim: usize,
    pub inference: InferenceConfig,
    /// SHA-256 of the graph JSON for CRF kinds.
    pub graph_hash: Option<String>,
    pub feature_map: FeatureMap,
    pub sigmoid: Option<AffineLayer>,
    pub heads: Vec<HeadEntry>,
}

impl Checkpoint {
    pub fn write(&self, path: &Path) -> Result<()> {
        let s = serde_json::to_string(self)?;
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph_rand;
    use crate::inference::Sharing;
    use crate::oracle::finite_diff;

    fn z(d: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn crf(kind: ModelKind, sharing: Sharing, hidden: Option<usize>, seed: u64) -> Model {
        let g = Arc::new(build_graph_rand(5, 6, seed).unwrap());
        Model::new(
            kind,
            5,
            8,
            Some(g),
            InferenceConfig::new(2, sharing),
            hidden,
            Init::Uniform { seed },
        )
        .unwrap()
    }

    #[test]
    fn zero_models_predict_half() {
        let s = Model::new(ModelKind::Sigmoid, 4, 3, None, InferenceConfig::default(), None, Init::Zeros)
            .unwrap();
        assert!(s.predict(&[1.0, 2.0, 3.0]).unwrap().probs().iter().all(|&p| p == 0.5));
        let g = Arc::new(build_graph_rand(4, 4, 0).unwrap());
        let c = Model::new(
            ModelKind::LinearCrf,
            4,
            3,
            Some(g),
            InferenceConfig::default(),
            None,
            Init::Zeros,
        )
        .unwrap();
        let p = c.predict(&[1.0, -2.0, 0.5]).unwrap();
        assert!(p.probs().iter().all(|&p| (p - 0.5).abs() < 1e-15));
        assert!(c.predict(&[1.0]).is_err());
    }

    #[test]
    fn const_crf_zero_pairwise_equals_unary_only() {
        let mut m = crf(ModelKind::ConstCrf, Sharing::Shared, None, 3);
        let graph = m.graph().unwrap().clone();
        for f in graph.pairwise_factors() {
            m.params.heads[0][f.id].biases = vec![0.0; 4];
        }
        let zz = z(8, 1);
        let h = m.tables(&zz).unwrap();
        let u = graph.unary_only();
        let mut ut = TableSet::zeros(&u);
        for i in 0..5 {
            ut.table_mut(i).copy_from_slice(h[0].table(i));
        }
        let want = inference::marginals(&u, &[ut], m.inference()).unwrap();
        let got = m.predict(&zz).unwrap();
        for i in 0..5 {
            assert!((want.p(i) - got.p(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn crf_requires_graph() {
        let r = Model::new(
            ModelKind::LinearCrf,
            3,
            2,
            None,
            InferenceConfig::default(),
            None,
            Init::Zeros,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    fn grad_check(m: &Model, seed: u64) {
        let zz = z(m.input_dim(), seed);
        let y: Vec<u8> = (0..m.n_attrs()).map(|i| ((i as u64 + seed) % 2) as u8).collect();
        let g = m.sample_grad(&zz, &y).unwrap();
        let mut flat = m.params.flatten();
        let np = flat.len();
        flat.extend_from_slice(&zz);
        let loss = |p: &[f64]| {
            let mut mm = m.clone();
            mm.params.load(&p[..np]).unwrap();
            mm.loss(&p[np..], &y).unwrap()
        };
        let num = finite_diff(loss, &flat, 1e-5).unwrap();
        let mut ana = g.params.flatten();
        ana.extend_from_slice(&g.z);
        assert!((g.loss - m.loss(&zz, &y).unwrap()).abs() < 1e-15);
        for (i, (a, n)) in ana.iter().zip(&num).enumerate() {
            let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-6);
            assert!(rel < 1e-4, "param {i}: analytic {a} vs numeric {n}");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..3 {
            grad_check(&crf(ModelKind::LinearCrf, Sharing::Shared, None, seed), seed);
            grad_check(&crf(ModelKind::ConstCrf, Sharing::Independent, None, seed), seed);
            grad_check(&crf(ModelKind::LinearCrf, Sharing::Independent, Some(6), seed), seed);
            let s = Model::new(
                ModelKind::Sigmoid,
                5,
                8,
                None,
                InferenceConfig::default(),
                Some(4),
                Init::Uniform { seed },
            )
            .unwrap();
            grad_check(&s, seed);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        for m in [
            crf(ModelKind::LinearCrf, Sharing::Independent, Some(3), 4),
            crf(ModelKind::ConstCrf, Sharing::Shared, None, 5),
        ] {
            let ck = m.to_checkpoint();
            let s = serde_json::to_string(&ck).unwrap();
            let back: Checkpoint = serde_json::from_str(&s).unwrap();
            let g = Arc::new(m.graph().unwrap().clone());
            let m2 = Model::from_checkpoint(back, Some(g)).unwrap();
            assert_eq!(m2, m);
            let other = Arc::new(build_graph_rand(5, 3, 99).unwrap());
            assert!(Model::from_checkpoint(ck.clone(), Some(other)).is_err());
            assert!(Model::from_checkpoint(ck, None).is_err());
        }
        let s = Model::new(ModelKind::Sigmoid, 3, 2, None, InferenceConfig::default(), None, Init::Uniform { seed: 1 })
            .unwrap();
        assert_eq!(Model::from_checkpoint(s.to_checkpoint(), None).unwrap(), s);
    }

    #[test]
    fn params_flatten_round_trip() {
        let m = crf(ModelKind::LinearCrf, Sharing::Independent, Some(2), 7);
        let flat = m.params.flatten();
        let mut p = m.params.zeros_like();
        p.load(&flat).unwrap();
        assert_eq!(p, m.params);
        assert!(p.load(&flat[1..]).is_err());
    }
}
