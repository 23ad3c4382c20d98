use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.0,
        }
    }
}

impl OptimizerConfig {
    /// Learning rate 0.1 with momentum 1e-4, taken literally.
    pub fn paper() -> Self {
        OptimizerConfig {
            learning_rate: 0.1,
            momentum: 1e-4,
            weight_decay: 0.0,
        }
    }

    /// Learning rate 0.1, momentum 0.9, reading 1e-4 as weight decay.
    pub fn paper_weight_decay() -> Self {
        OptimizerConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::out_of_range("learning_rate", self.learning_rate.to_string()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::out_of_range("momentum", format!("{} not in [0, 1)", self.momentum)));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::out_of_range("weight_decay", self.weight_decay.to_string()));
        }
        Ok(())
    }
}

/// Classical momentum: `v ← m·v + g`, `θ ← θ − lr·v`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub config: OptimizerConfig,
    pub velocity: Vec<f64>,
}

impl OptimizerState {
    pub fn new(config: OptimizerConfig, n_params: usize) -> Self {
        OptimizerState {
            config,
            velocity: vec![0.0; n_params],
        }
    }
}

pub fn sgd_step(params: &mut [f64], grads: &[f64], state: &mut OptimizerState) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.velocity.len() {
        return Err(Error::Dimension(format!(
            "{} params, {} grads, {} velocity entries",
            params.len(),
            grads.len(),
            state.velocity.len()
        )));
    }
    let OptimizerConfig {
        learning_rate: lr,
        momentum: m,
        weight_decay: wd,
    } = state.config;
    for ((p, &g), v) in params.iter_mut().zip(grads).zip(&mut state.velocity) {
        *v = m * *v + g + wd * *p;
        *p -= lr * *v;
    }
    Ok(())
}
