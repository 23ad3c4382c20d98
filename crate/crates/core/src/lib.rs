#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Trainable conditional random fields for multi-attribute prediction.
//!
//! Attribute prediction is posed as marginal inference in a CRF whose
//! potentials are produced from a feature vector by small learnable heads.
//! Marginals are computed by a fixed number of unrolled flooding-schedule
//! sum-product rounds, and gradients flow back through every round so that
//! the potentials can be learned end to end with SGD.
//!
//! The crate is organised as:
//!
//! - [`graph`]: factor graphs over binary attributes and the `min` / `rand` /
//!   `top` sparse construction policies driven by label correlations.
//! - [`potentials`]: softplus-linear and softplus-constant potential heads.
//! - [`inference`]: unrolled sum-product with a recorded tape for exact
//!   reverse-mode gradients.
//! - [`oracle`]: brute-force enumeration, finite differences and a Gibbs
//!   sampler used to check everything else.
//! - [`trainer`]: the Sigmoid / Const CRF / Linear CRF models, BCE loss,
//!   momentum SGD, metrics and a synthetic structured-attribute dataset.
//! - [`cli`]: the command implementations behind the `attrcrf` binary.

pub mod bench;
pub mod check;
pub mod cli;
pub mod error;
pub mod graph;
pub mod inference;
pub mod matrix;
pub mod oracle;
pub mod potentials;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{CorrelationMatrix, FactorGraph, FactorKind, GraphPolicy, GraphStats};
pub use inference::{InferenceConfig, Marginals, Sharing, TableSet};
pub use matrix::{LabelMatrix, Matrix};
pub use potentials::{HeadKind, PotentialHead, PotentialTable};
