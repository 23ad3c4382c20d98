use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::LabelMatrix;
use crate::trainer::{Dataset, Model, Split};

/// Per-cell accuracy plus macro-averaged precision, recall and F1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub avg_precision: f64,
    pub avg_recall: f64,
    pub avg_f1: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
}

/// `p >= 0.5` is a positive prediction.
pub fn threshold(p: f64) -> u8 {
    u8::from(p >= 0.5)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Metrics from hard predictions; 0/0 ratios count as 0.
pub fn metrics_from_predictions(pred: &LabelMatrix, labels: &LabelMatrix) -> MetricsReport {
    assert_eq!((pred.rows(), pred.cols()), (labels.rows(), labels.cols()));
    let (m, n) = (labels.rows(), labels.cols());
    let mut correct = 0;
    let (mut precision, mut recall, mut f1) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..n {
        let (mut tp, mut fp, mut fneg) = (0, 0, 0);
        for i in 0..m {
            match (pred.get(i, j), labels.get(i, j)) {
                (1, 1) => tp += 1,
                (1, 0) => fp += 1,
                (0, 1) => fneg += 1,
                _ => {}
            }
            correct += usize::from(pred.get(i, j) == labels.get(i, j));
        }
        let p = ratio(tp, tp + fp);
        let r = ratio(tp, tp + fneg);
        precision.push(p);
        recall.push(r);
        f1.push(if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 });
    }
    MetricsReport {
        accuracy: ratio(correct, m * n),
        avg_precision: mean(&precision),
        avg_recall: mean(&recall),
        avg_f1: mean(&f1),
        precision,
        recall,
        f1,
    }
}

/// Thresholded predictions for every row of `split`.
pub fn predict_split(model: &Model, data: &Dataset, split: Split) -> Result<(LabelMatrix, Vec<Vec<f64>>)> {
    let idx = data.indices(split);
    let probs: Vec<Vec<f64>> = idx
        .par_iter()
        .map(|&i| model.predict(data.features.row(i)).map(|m| m.probs()))
        .collect::<Result<_>>()?;
    let hard: Vec<Vec<u8>> = probs
        .iter()
        .map(|p| p.iter().copied().map(threshold).collect())
        .collect();
    let pred = if hard.is_empty() {
        LabelMatrix::zeros(0, data.labels.cols())
    } else {
        LabelMatrix::from_rows(&hard)?
    };
    Ok((pred, probs))
}

pub fn evaluate(model: &Model, data: &Dataset, split: Split) -> Result<MetricsReport> {
    let (pred, _) = predict_split(model, data, split)?;
    let labels = data.labels.select_rows(&data.indices(split));
    Ok(metrics_from_predictions(&pred, &labels))
}
