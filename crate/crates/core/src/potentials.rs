//! Learnable heads producing strictly positive potential tables.
//!
//! A head maps a feature vector `z` to one value per joint state of its factor
//! scope: `softplus(w_X · z + b_X)` for the linear kind and `softplus(c_X)` for
//! the constant kind. States are indexed row-major over the scope, so a unary
//! table is `[x=0, x=1]` and a pairwise table is `[(0,0), (0,1), (1,0), (1,1)]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ln(1 + e^a)` without overflow for large `|a|`.
pub fn softplus(a: f64) -> f64 {
    a.max(0.0) + (-a.abs()).exp().ln_1p()
}

/// Derivative of [`softplus`].
pub fn logistic(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadKind {
    SoftplusLinear,
    SoftplusConst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialHead {
    pub kind: HeadKind,
    pub n_states: usize,
    pub dim: usize,
    /// `n_states × dim`, row-major; empty for the constant kind.
    pub weights: Vec<f64>,
    /// `b_X` for the linear kind, `c_X` for the constant kind.
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTable {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadGrad {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub z: Vec<f64>,
}

fn check_states(n_states: usize) -> Result<()> {
    if n_states == 2 || n_states == 4 {
        Ok(())
    } else {
        Err(Error::out_of_range("n_states", format!("{n_states}, expected 2 or 4")))
    }
}

impl PotentialHead {
    /// All parameters zero: every table entry is `ln 2`.
    pub fn zeros(kind: HeadKind, n_states: usize, dim: usize) -> Result<Self> {
        check_states(n_states)?;
        let n_weights = match kind {
            HeadKind::SoftplusLinear => n_states * dim,
            HeadKind::SoftplusConst => 0,
        };
        Ok(PotentialHead {
            kind,
            n_states,
            dim,
            weights: vec![0.0; n_weights],
            biases: vec![0.0; n_states],
        })
    }

    /// Weights uniform on `[-1/√dim, 1/√dim]`, biases zero.
    pub fn init(kind: HeadKind, n_states: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::init_with(kind, n_states, dim, &mut rng)
    }

    pub fn init_with<R: Rng>(
        kind: HeadKind,
        n_states: usize,
        dim: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut head = Self::zeros(kind, n_states, dim)?;
        if !head.weights.is_empty() {
            let s = 1.0 / (dim as f64).sqrt();
            for w in &mut head.weights {
                *w = rng.random_range(-s..=s);
            }
        }
        Ok(head)
    }

    pub fn n_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    /// Checks that parameter shapes agree with `kind`, `n_states` and `dim`.
    pub fn validate(&self) -> Result<()> {
        check_states(self.n_states)?;
        let want = match self.kind {
            HeadKind::SoftplusLinear => self.n_states * self.dim,
            HeadKind::SoftplusConst => 0,
        };
        if self.weights.len() != want || self.biases.len() != self.n_states {
            return Err(Error::Dimension(format!(
                "{:?} head with {} states and dim {} has {} weights and {} biases",
                self.kind,
                self.n_states,
                self.dim,
                self.weights.len(),
                self.biases.len()
            )));
        }
        Ok(())
    }

    fn check_z(&self, z: &[f64]) -> Result<()> {
        if self.kind == HeadKind::SoftplusLinear && z.len() != self.dim {
            return Err(Error::Dimension(format!(
                "head expects {} features, got {}",
                self.dim,
                z.len()
            )));
        }
        Ok(())
    }

    fn preactivation(&self, z: &[f64], state: usize) -> f64 {
        match self.kind {
            HeadKind::SoftplusLinear => {
                let w = &self.weights[state * self.dim..(state + 1) * self.dim];
                w.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + self.biases[state]
            }
            HeadKind::SoftplusConst => self.biases[state],
        }
    }

    pub fn eval(&self, z: &[f64]) -> Result<PotentialTable> {
        let mut values = vec![0.0; self.n_states];
        self.eval_into(z, &mut values)?;
        Ok(PotentialTable { values })
    }

    pub fn eval_into(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_z(z)?;
        for (s, o) in out.iter_mut().enumerate().take(self.n_states) {
            *o = softplus(self.preactivation(z, s));
        }
        Ok(())
    }

    pub fn backward(&self, z: &[f64], upstream: &[f64]) -> Result<HeadGrad> {
        let mut g = HeadGrad {
            weights: vec![0.0; self.weights.len()],
            biases: vec![0.0; self.n_states],
            z: vec![0.0; z.len()],
        };
        self.backward_accumulate(z, upstream, &mut g.weights, &mut g.biases, &mut g.z)?;
        Ok(g)
    }

    /// Adds this head's gradients into the provided buffers.
    pub fn backward_accumulate(
        &self,
        z: &[f64],
        upstream: &[f64],
        grad_weights: &mut [f64],
        grad_biases: &mut [f64],
        grad_z: &mut [f64],
    ) -> Result<()> {
        self.check_z(z)?;
        if upstream.len() != self.n_states {
            return Err(Error::Dimension(format!(
                "upstream has {} entries for a {}-state head",
                upstream.len(),
                self.n_states
            )));
        }
        for s in 0..self.n_states {
            if upstream[s] == 0.0 {
                continue;
            }
            let g = upstream[s] * logistic(self.preactivation(z, s));
            grad_biases[s] += g;
            if self.kind == HeadKind::SoftplusLinear {
                let d = self.dim;
                let w = &self.weights[s * d..(s + 1) * d];
                let gw = &mut grad_weights[s * d..(s + 1) * d];
                for k in 0..d {
                    gw[k] += g * z[k];
                    grad_z[k] += g * w[k];
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::finite_diff;
    use rand::Rng;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(0.0) - LN2).abs() < 1e-15);
        // high-precision reference: ln(1 + e^100) = 100 + ln(1 + e^-100)
        assert_eq!(softplus(100.0), 100.0 + (-100f64).exp());
        assert!(softplus(1000.0).is_finite());
        assert!(softplus(-800.0) >= 0.0);
        assert!((softplus(-30.0) - (-30f64).exp()).abs() < 1e-25);
        assert!((logistic(0.0) - 0.5).abs() < 1e-15);
        assert!(logistic(-1000.0) >= 0.0 && logistic(1000.0) <= 1.0);
    }

    #[test]
    fn eval_examples() {
        let h = PotentialHead::zeros(HeadKind::SoftplusLinear, 4, 3).unwrap();
        for v in h.eval(&[1.0, -2.0, 3.0]).unwrap().values {
            assert!((v - LN2).abs() < 1e-15);
        }
        let c = PotentialHead::zeros(HeadKind::SoftplusConst, 4, 3).unwrap();
        assert_eq!(c.eval(&[]).unwrap().values, vec![softplus(0.0); 4]);

        let mut big = PotentialHead::zeros(HeadKind::SoftplusLinear, 2, 2).unwrap();
        big.biases = vec![100.0, 100.0];
        let t = big.eval(&[0.5, 0.5]).unwrap();
        assert!((t.values[0] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn eval_dimension_mismatch() {
        let h = PotentialHead::zeros(HeadKind::SoftplusLinear, 2, 3).unwrap();
        assert!(matches!(h.eval(&[1.0]), Err(Error::Dimension(_))));
        assert!(PotentialHead::zeros(HeadKind::SoftplusLinear, 3, 3).is_err());
    }

    #[test]
    fn const_head_gradients() {
        let mut h = PotentialHead::zeros(HeadKind::SoftplusConst, 4, 5).unwrap();
        h.biases = vec![0.3, -1.0, 2.0, 0.0];
        let up = [1.0, 2.0, -1.0, 0.5];
        let z = [1.0, 2.0, 3.0, 4.0, 5.0];
        let g = h.backward(&z, &up).unwrap();
        for s in 0..4 {
            assert!((g.biases[s] - up[s] * logistic(h.biases[s])).abs() < 1e-15);
        }
        assert!(g.z.iter().all(|&v| v == 0.0));
        assert!(g.weights.is_empty());
    }

    #[test]
    fn zero_upstream_zero_grad() {
        let h = PotentialHead::init(HeadKind::SoftplusLinear, 4, 6, 1).unwrap();
        let g = h.backward(&[0.1; 6], &[0.0; 4]).unwrap();
        assert!(g.weights.iter().chain(&g.biases).chain(&g.z).all(|&v| v == 0.0));
    }

    #[test]
    fn init_examples() {
        let c = PotentialHead::init(HeadKind::SoftplusConst, 4, 16, 3).unwrap();
        assert!(c.biases.iter().all(|&b| b == 0.0));
        let a = PotentialHead::init(HeadKind::SoftplusLinear, 4, 16, 42).unwrap();
        let b = PotentialHead::init(HeadKind::SoftplusLinear, 4, 16, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.weights.iter().all(|w| w.abs() <= 0.25));
        assert!(a.biases.iter().all(|&v| v == 0.0));
    }

    fn flat(h: &PotentialHead, z: &[f64]) -> Vec<f64> {
        h.weights.iter().chain(&h.biases).chain(z).copied().collect()
    }

    fn unflat(h: &PotentialHead, p: &[f64]) -> (PotentialHead, Vec<f64>) {
        let mut h = h.clone();
        let nw = h.weights.len();
        let nb = h.biases.len();
        h.weights.copy_from_slice(&p[..nw]);
        h.biases.copy_from_slice(&p[nw..nw + nb]);
        (h, p[nw + nb..].to_vec())
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in [HeadKind::SoftplusLinear, HeadKind::SoftplusConst] {
            for trial in 0..5 {
                let mut h = PotentialHead::init(kind, 4, 7, trial).unwrap();
                h.biases.iter_mut().for_each(|b| *b = rng.random_range(-2.0..2.0));
                let z: Vec<f64> = (0..7).map(|_| rng.random_range(-1.5..1.5)).collect();
                let up: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
                let loss = |p: &[f64]| {
                    let (h2, z2) = unflat(&h, p);
                    let t = h2.eval(&z2).unwrap();
                    t.values.iter().zip(&up).map(|(a, b)| a * b).sum::<f64>()
                };
                let num = finite_diff(loss, &flat(&h, &z), 1e-5).unwrap();
                let g = h.backward(&z, &up).unwrap();
                let ana: Vec<f64> = g.weights.iter().chain(&g.biases).chain(&g.z).copied().collect();
                for (a, n) in ana.iter().zip(&num) {
                    let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-8);
                    assert!(rel < 1e-6 || (a - n).abs() < 1e-9, "{a} vs {n}");
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn tables_are_positive(seed in 0u64..1000, scale in 0.0f64..10.0) {
            let mut h = PotentialHead::init(HeadKind::SoftplusLinear, 4, 5, seed).unwrap();
            h.weights.iter_mut().for_each(|w| *w *= scale);
            let z = [scale, -scale, 1.0, 0.0, -1.0];
            for v in h.eval(&z).unwrap().values {
                proptest::prop_assert!(v > 0.0);
            }
        }

        #[test]
        fn const_heads_ignore_features(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let mut h = PotentialHead::zeros(HeadKind::SoftplusConst, 4, 2).unwrap();
            h.biases = vec![a, b, -a, 0.5];
            proptest::prop_assert_eq!(h.eval(&[a, b]).unwrap(), h.eval(&[0.0, 1.0]).unwrap());
        }
    }
}
