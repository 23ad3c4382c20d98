use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FactorGraph;
use crate::inference::InferenceConfig;
use crate::trainer::{
    evaluate, sgd_step, Dataset, Init, MetricsReport, Model, ModelKind, OptimizerConfig, OptimizerState, Split,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    /// `(epoch, learning_rate)`: from that (0-based) epoch on, use the rate.
    pub lr_drops: Vec<(usize, f64)>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 40,
            batch_size: 32,
            optimizer: OptimizerConfig::default(),
            lr_drops: Vec::new(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn learning_rate(&self, epoch: usize) -> f64 {
        self.lr_drops
            .iter()
            .filter(|(e, _)| *e <= epoch)
            .max_by_key(|(e, _)| *e)
            .map_or(self.optimizer.learning_rate, |&(_, lr)| lr)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
    pub val_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct History {
    pub records: Vec<EpochRecord>,
    /// Epoch whose parameters were returned; `None` when no epoch ran.
    pub best_epoch: Option<usize>,
}

impl History {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,val_accuracy,val_f1\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{}\n",
                r.epoch, r.train_loss, r.val_accuracy, r.val_f1
            ));
        }
        s
    }

    /// Parses [`History::to_csv`] output; the best epoch is recomputed.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "epoch,train_loss,val_accuracy,val_f1")) => {}
            _ => {
                return Err(Error::Parse {
                    what: "history",
                    line: 1,
                    detail: "missing header".into(),
                })
            }
        }
        let mut history = History::default();
        let mut best = f64::NEG_INFINITY;
        for (i, line) in lines.filter(|(_, l)| !l.is_empty()) {
            let bad = |detail: String| Error::Parse { what: "history", line: i + 1, detail };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
            let record = EpochRecord {
                epoch: f[0].parse().map_err(|e| bad(format!("{:?}: {e}", f[0])))?,
                train_loss: num(f[1])?,
                val_accuracy: num(f[2])?,
                val_f1: num(f[3])?,
            };
            if record.val_accuracy > best {
                best = record.val_accuracy;
                history.best_epoch = Some(record.epoch);
            }
            history.records.push(record);
        }
        Ok(history)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Mean loss and mean flat gradient over `rows`.
fn batch_gradient(model: &Model, data: &Dataset, rows: &[usize]) -> Result<(f64, Vec<f64>)> {
    let grads: Vec<(f64, Vec<f64>)> = rows
        .par_iter()
        .map(|&i| {
            model
                .sample_grad(data.features.row(i), data.labels.row(i))
                .map(|g| (g.loss, g.params.flatten()))
        })
        .collect::<Result<_>>()?;
    let n = rows.len() as f64;
    let mut total = vec![0.0; model.params.n_params()];
    let mut loss = 0.0;
    // fixed summation order keeps results independent of the thread count
    for (l, g) in &grads {
        loss += l;
        for (t, v) in total.iter_mut().zip(g) {
            *t += v;
        }
    }
    total.iter_mut().for_each(|t| *t /= n);
    Ok((loss / n, total))
}

/// Minibatch momentum SGD; returns the parameters of the epoch with the best
/// validation accuracy (earliest on ties).
pub fn train(model: &Model, data: &Dataset, cfg: &TrainConfig) -> Result<(Model, History)> {
    cfg.optimizer.validate()?;
    if cfg.batch_size == 0 {
        return Err(Error::out_of_range("batch_size", "must be positive"));
    }
    let train_rows = data.indices(Split::Train);
    if train_rows.is_empty() || data.indices(Split::Val).is_empty() {
        return Err(Error::Config("training needs non-empty train and val splits".into()));
    }
    if data.dim() != model.input_dim() || data.n_attrs() != model.n_attrs() {
        return Err(Error::Dimension(format!(
            "model is {}->{}, data is {}->{}",
            model.input_dim(),
            model.n_attrs(),
            data.dim(),
            data.n_attrs()
        )));
    }

    let mut current = model.clone();
    let mut best = model.clone();
    let mut best_acc = f64::NEG_INFINITY;
    let mut history = History::default();
    let mut params = current.params.flatten();
    let mut opt = OptimizerState::new(cfg.optimizer, params.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order = train_rows;

    for epoch in 0..cfg.epochs {
        opt.config.learning_rate = cfg.learning_rate(epoch);
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let (loss, grad) = batch_gradient(&current, data, batch)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Divergence { epoch, loss });
            }
            epoch_loss += loss * batch.len() as f64;
            sgd_step(&mut params, &grad, &mut opt)?;
            if params.iter().any(|p| !p.is_finite()) {
                return Err(Error::Divergence { epoch, loss });
            }
            current.params.load(&params)?;
        }
        let train_loss = epoch_loss / order.len() as f64;
        let val = evaluate(&current, data, Split::Val)?;
        history.records.push(EpochRecord {
            epoch: epoch + 1,
            train_loss,
            val_accuracy: val.accuracy,
            val_f1: val.avg_f1,
        });
        if val.accuracy > best_acc {
            best_acc = val.accuracy;
            best = current.clone();
            history.best_epoch = Some(epoch + 1);
        }
    }
    Ok((best, history))
}

/// Trains a freshly initialised model and reports its test-split metrics.
pub fn fit_and_evaluate(
    kind: ModelKind,
    data: &Dataset,
    graph: Option<Arc<FactorGraph>>,
    inference: InferenceConfig,
    init: Init,
    cfg: &TrainConfig,
) -> Result<(Model, History, MetricsReport)> {
    let model = Model::new(kind, data.n_attrs(), data.dim(), graph, inference, None, init)?;
    let (best, history) = train(&model, data, cfg)?;
    let report = evaluate(&best, data, Split::Test)?;
    Ok((best, history, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{LabelMatrix, Matrix};

    fn separable() -> Dataset {
        let m = 200;
        let mut f = Vec::new();
        let mut l = Vec::new();
        let mut split = Vec::new();
        for i in 0..m {
            let x = (i as f64 / m as f64) * 4.0 - 2.0 + 0.01;
            f.push(vec![x, 1.0]);
            l.push(vec![u8::from(x > 0.0)]);
            split.push(if i % 5 == 0 { Split::Val } else { Split::Train });
        }
        Dataset::new(Matrix::from_rows(&f).unwrap(), LabelMatrix::from_rows(&l).unwrap(), split).unwrap()
    }

    fn sigmoid(data: &Dataset) -> Model {
        Model::new(
            ModelKind::Sigmoid,
            data.n_attrs(),
            data.dim(),
            None,
            InferenceConfig::default(),
            None,
            Init::Zeros,
        )
        .unwrap()
    }

    #[test]
    fn zero_epochs_returns_initial_model() {
        let d = separable();
        let m = sigmoid(&d);
        let (out, h) = train(&m, &d, &TrainConfig { epochs: 0, ..Default::default() }).unwrap();
        assert_eq!(out, m);
        assert!(h.records.is_empty());
        assert_eq!(h.best_epoch, None);
    }

    #[test]
    fn separable_logistic_regression() {
        let d = separable();
        let cfg = TrainConfig {
            epochs: 200,
            batch_size: 16,
            ..Default::default()
        };
        let (out, h) = train(&sigmoid(&d), &d, &cfg).unwrap();
        let acc = evaluate(&out, &d, Split::Train).unwrap().accuracy;
        assert!(acc >= 0.99, "train accuracy {acc}");
        let (_, h2) = train(&sigmoid(&d), &d, &cfg).unwrap();
        assert_eq!(h, h2);
        assert_eq!(History::from_csv(&h.to_csv()).unwrap(), h);
    }

    #[test]
    fn lr_drops() {
        let cfg = TrainConfig {
            lr_drops: vec![(20, 0.01), (10, 0.05)],
            ..Default::default()
        };
        assert_eq!(cfg.learning_rate(0), 0.1);
        assert_eq!(cfg.learning_rate(10), 0.05);
        assert_eq!(cfg.learning_rate(25), 0.01);
    }

    #[test]
    fn divergence_is_reported() {
        let mut d = separable();
        d.features.set(1, 0, f64::NAN);
        let r = train(&sigmoid(&d), &d, &TrainConfig { epochs: 1, ..Default::default() });
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn history_csv_header() {
        let h = History {
            records: vec![EpochRecord {
                epoch: 1,
                train_loss: 0.5,
                val_accuracy: 0.75,
                val_f1: 0.25,
            }],
            best_epoch: Some(1),
        };
        assert_eq!(h.to_csv(), "epoch,train_loss,val_accuracy,val_f1\n1,0.5,0.75,0.25\n");
        assert_eq!(History::from_csv(&h.to_csv()).unwrap(), h);
        assert!(History::from_csv("1,2,3,4\n").is_err());
    }
}
