//! Datasets, their CSV files, and the synthetic structured-attribute generator.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FactorGraph;
use crate::inference::TableSet;
use crate::matrix::{LabelMatrix, Matrix};
use crate::oracle::{gibbs_sample_thinned, MAX_ENUM_VARS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(Error::Config(format!("unknown split '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: LabelMatrix,
    pub split: Vec<Split>,
}

pub const FEATURES_FILE: &str = "features.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const SPLIT_FILE: &str = "split.csv";

impl Dataset {
    pub fn new(features: Matrix, labels: LabelMatrix, split: Vec<Split>) -> Result<Self> {
        if features.rows() != labels.rows() || labels.rows() != split.len() {
            return Err(Error::Dimension(format!(
                "{} feature rows, {} label rows, {} split rows",
                features.rows(),
                labels.rows(),
                split.len()
            )));
        }
        Ok(Dataset {
            features,
            labels,
            split,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.rows()
    }

    pub fn n_attrs(&self) -> usize {
        self.labels.cols()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.split.len()).filter(|&i| self.split[i] == split).collect()
    }

    pub fn split_labels(&self, split: Split) -> LabelMatrix {
        self.labels.select_rows(&self.indices(split))
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.write(
            &dir.join(FEATURES_FILE),
            &dir.join(LABELS_FILE),
            &dir.join(SPLIT_FILE),
        )
    }

    pub fn write(&self, features: &Path, labels: &Path, split: &Path) -> Result<()> {
        let mut f = String::new();
        for i in 0..self.features.rows() {
            let row: Vec<String> = self.features.row(i).iter().map(|v| v.to_string()).collect();
            f.push_str(&row.join(","));
            f.push('\n');
        }
        write_file(features, &f)?;
        let mut l = String::new();
        for i in 0..self.labels.rows() {
            let row: Vec<&str> = self
                .labels
                .row(i)
                .iter()
                .map(|&v| if v == 1 { "1" } else { "0" })
                .collect();
            l.push_str(&row.join(","));
            l.push('\n');
        }
        write_file(labels, &l)?;
        let s: String = self.split.iter().map(|s| format!("{s}\n")).collect();
        write_file(split, &s)
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        Self::read(
            &dir.join(FEATURES_FILE),
            &dir.join(LABELS_FILE),
            &dir.join(SPLIT_FILE),
        )
    }

    pub fn read(features: &Path, labels: &Path, split: &Path) -> Result<Self> {
        let features = read_features(features)?;
        let labels = read_labels(labels)?;
        let text = read_file(split)?;
        let split = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<Split>().map_err(|_| Error::Parse {
                    what: "split file",
                    line: i + 1,
                    detail: format!("'{l}' is not train/val/test"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(features, labels, split)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_features(path: &Path) -> Result<Matrix> {
    let text = read_file(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|e| Error::Parse {
                    what: "features CSV",
                    line: i + 1,
                    detail: format!("'{t}': {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Matrix::from_rows(&rows)
}

pub fn read_labels(path: &Path) -> Result<LabelMatrix> {
    let text = read_file(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| match t.trim() {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(Error::Parse {
                    what: "labels CSV",
                    line: i + 1,
                    detail: format!("'{other}' is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push(row);
    }
    LabelMatrix::from_rows(&rows)
}

/// `x` with 9 significant digits, in exponent form.
pub fn format_sig(x: f64) -> String {
    format!("{x:.8e}")
}

/// One row per sample, one column of `p(x_i = 1)` per attribute.
pub fn write_marginals_csv(path: &Path, probs: &[Vec<f64>]) -> Result<()> {
    let mut s = String::new();
    for row in probs {
        let cells: Vec<String> = row.iter().map(|&p| format_sig(p)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    write_file(path, &s)
}

/// Knobs of the synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub n_attrs: usize,
    pub dim: usize,
    pub n_samples: usize,
    /// Scale of the pairwise log-couplings of the ground-truth MRF.
    pub coupling: f64,
    /// Half-width of the log-uniform spread of coupling magnitudes.
    pub coupling_spread: f64,
    /// Standard deviation of the additive feature noise.
    pub noise: f64,
    /// Attributes whose feature direction is projected away.
    pub n_hidden: usize,
    pub seed: u64,
    pub burn_in: usize,
    /// Gibbs sweeps between recorded samples.
    pub thin: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_attrs: 12,
            dim: 16,
            n_samples: 6000,
            coupling: 1.5,
            coupling_spread: 0.5,
            noise: 0.5,
            n_hidden: 4,
            seed: 0,
            burn_in: 100,
            thin: 2,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_attrs == 0 || self.n_attrs > MAX_ENUM_VARS {
            return Err(Error::out_of_range(
                "n_attrs",
                format!("{} not in 1..={MAX_ENUM_VARS}", self.n_attrs),
            ));
        }
        if self.n_hidden > self.n_attrs {
            return Err(Error::out_of_range("n_hidden", format!("{} > n_attrs", self.n_hidden)));
        }
        if !(self.coupling >= 0.0) || !(self.noise >= 0.0) || !(self.coupling_spread >= 0.0) {
            return Err(Error::out_of_range("coupling/noise/coupling_spread", "must be non-negative".to_string()));
        }
        if self.dim == 0 || self.n_samples < 5 {
            return Err(Error::out_of_range(
                "dim/n_samples",
                format!("dim {} and n_samples {}", self.dim, self.n_samples),
            ));
        }
        Ok(())
    }
}

/// A generated dataset with the structure that produced it.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub truth_graph: FactorGraph,
    pub truth_tables: TableSet,
    pub hidden: Vec<usize>,
    /// `dim × n_attrs` feature map applied to `2y - 1`.
    pub projection: Matrix,
}

/// Samples labels from a random pairwise MRF and features `A (2y - 1) + noise`.
///
/// The MRF is a random spanning tree plus `n_attrs / 2` extra edges with
/// log-couplings of magnitude `coupling · exp(U(-s, s))`, mostly attractive.
/// Columns of `A` for the hidden attributes are zero, so those attributes can
/// only be inferred through their neighbours.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticData> {
    cfg.validate()?;
    let n = cfg.n_attrs;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        pairs.push((j, i));
    }
    let extra = n / 2;
    let mut attempts = 0;
    while pairs.len() < n - 1 + extra && attempts < 100 * n {
        attempts += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let p = (a.min(b), a.max(b));
        if a != b && !pairs.contains(&p) {
            pairs.push(p);
        }
    }
    pairs.sort_unstable();
    let graph = FactorGraph::new(n, &pairs)?;

    let mut tables = TableSet::zeros(&graph);
    for i in 0..n {
        let h: f64 = rng.random_range(-1.0..0.0);
        tables.table_mut(i).copy_from_slice(&[(-h).exp(), h.exp()]);
    }
    for f in graph.pairwise_factors() {
        let sign = if rng.random::<f64>() < 0.75 { 1.0 } else { -1.0 };
        let spread = if cfg.coupling_spread > 0.0 {
            rng.random_range(-cfg.coupling_spread..cfg.coupling_spread)
        } else {
            0.0
        };
        let j = sign * cfg.coupling * spread.exp();
        let (same, diff) = (j.exp(), (-j).exp());
        tables.table_mut(f.id).copy_from_slice(&[same, diff, diff, same]);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut hidden = order[..cfg.n_hidden].to_vec();
    hidden.sort_unstable();

    let mut projection = Matrix::zeros(cfg.dim, n);
    let scale = 1.0 / (cfg.dim as f64).sqrt();
    for d in 0..cfg.dim {
        for k in 0..n {
            let v: f64 = rng.sample(StandardNormal);
            if !hidden.contains(&k) {
                projection.set(d, k, v * scale);
            }
        }
    }

    let labels = gibbs_sample_thinned(
        &graph,
        &tables,
        cfg.n_samples,
        cfg.burn_in,
        cfg.thin,
        rng.random(),
    )?;

    let mut features = Matrix::zeros(cfg.n_samples, cfg.dim);
    for i in 0..cfg.n_samples {
        let y = labels.row(i);
        let row = features.row_mut(i);
        for (d, out) in row.iter_mut().enumerate() {
            let signal: f64 = (0..n)
                .map(|k| projection.get(d, k) * (2.0 * y[k] as f64 - 1.0))
                .sum();
            let eps: f64 = rng.sample(StandardNormal);
            *out = signal + cfg.noise * eps;
        }
    }

    let mut rows: Vec<usize> = (0..cfg.n_samples).collect();
    rows.shuffle(&mut rng);
    let n_train = cfg.n_samples * 6 / 10;
    let n_val = cfg.n_samples * 2 / 10;
    let mut split = vec![Split::Test; cfg.n_samples];
    for (rank, &r) in rows.iter().enumerate() {
        if rank < n_train {
            split[r] = Split::Train;
        } else if rank < n_train + n_val {
            split[r] = Split::Val;
        }
    }

    Ok(SyntheticData {
        dataset: Dataset::new(features, labels, split)?,
        truth_graph: graph,
        truth_tables: tables,
        hidden,
        projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::compute_correlation;

    #[test]
    fn split_is_60_20_20() {
        let d = generate_synthetic(&SyntheticConfig {
            n_samples: 100,
            ..Default::default()
        })
        .unwrap()
        .dataset;
        assert_eq!(d.indices(Split::Train).len(), 60);
        assert_eq!(d.indices(Split::Val).len(), 20);
        assert_eq!(d.indices(Split::Test).len(), 20);
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SyntheticConfig {
            n_samples: 300,
            seed: 9,
            ..Default::default()
        };
        let a = generate_synthetic(&cfg).unwrap();
        let b = generate_synthetic(&cfg).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.truth_graph, b.truth_graph);
    }

    #[test]
    fn zero_coupling_gives_independent_labels() {
        let d = generate_synthetic(&SyntheticConfig {
            coupling: 0.0,
            noise: 0.0,
            n_samples: 10_000,
            seed: 4,
            ..Default::default()
        })
        .unwrap();
        let c = compute_correlation(&d.dataset.labels).unwrap();
        for i in 0..12 {
            for j in i + 1..12 {
                assert!(c.get(i, j).abs() < 0.05, "corr({i},{j}) = {}", c.get(i, j));
            }
        }
    }

    #[test]
    fn guards() {
        let too_many = SyntheticConfig {
            n_attrs: 25,
            ..Default::default()
        };
        assert!(generate_synthetic(&too_many).is_err());
        let neg = SyntheticConfig {
            coupling: -1.0,
            ..Default::default()
        };
        assert!(generate_synthetic(&neg).is_err());
    }

    #[test]
    fn hidden_columns_are_zero() {
        let s = generate_synthetic(&SyntheticConfig {
            n_samples: 50,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(s.hidden.len(), 4);
        for &h in &s.hidden {
            assert!((0..16).all(|d| s.projection.get(d, h) == 0.0));
        }
    }

    #[test]
    fn csv_round_trip() {
        let s = generate_synthetic(&SyntheticConfig {
            n_samples: 40,
            ..Default::default()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        s.dataset.write_dir(dir.path()).unwrap();
        let back = Dataset::read_dir(dir.path()).unwrap();
        assert_eq!(back, s.dataset);
    }

    #[test]
    fn malformed_labels_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.csv");
        fs::write(&p, "0,1\n1,2\n").unwrap();
        assert!(matches!(read_labels(&p), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn sig_format() {
        assert_eq!(format_sig(0.123456789123), "1.23456789e-1");
        assert_eq!(format_sig(0.5).parse::<f64>().unwrap(), 0.5);
    }
}
