//! Models, loss, optimisation, metrics and the synthetic dataset.

mod dataset;
mod loss;
mod metrics;
mod model;
mod optim;
mod train;

pub use dataset::{
    format_sig, generate_synthetic, read_features, read_labels, write_marginals_csv, Dataset, Split,
    SyntheticConfig, SyntheticData,
};
pub use loss::{bce_grad, bce_loss, PROB_EPS};
pub use metrics::{evaluate, metrics_from_predictions, predict_split, threshold, MetricsReport};
pub use model::{
    AffineLayer, Checkpoint, FeatureMap, HeadEntry, Init, Model, ModelKind, Params, SampleGrad,
};
pub use optim::{sgd_step, OptimizerConfig, OptimizerState};
pub use train::{fit_and_evaluate, train, EpochRecord, History, TrainConfig};
