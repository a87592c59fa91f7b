use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub replications: usize,
    pub seed: u64,
    /// Split each class separately so every class appears in training.
    pub stratified: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            test_fraction: 0.5,
            replications: 100,
            seed: 42,
            stratified: true,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return invalid(format!("test_fraction must be in (0, 1), got {}", self.test_fraction));
        }
        if self.replications == 0 {
            return invalid("replications must be at least 1");
        }
        Ok(())
    }
}

/// Row indices of one train/test partition, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// The partition used by replication `replication`; identical for every
/// method evaluated in that replication.
pub fn make_split(data: &LabeledDataset, config: &SplitConfig, replication: usize) -> Result<Split> {
    config.validate()?;
    let mut rng = seeded(derive_seed(config.seed, &[0x5717, replication as u64]));
    let mut train = Vec::new();
    let mut test = Vec::new();
    let groups: Vec<Vec<usize>> = if config.stratified {
        let k = data.num_classes()?;
        (0..k).map(|c| data.class_rows(c)).collect::<Result<_>>()?
    } else {
        vec![(0..data.n()).collect()]
    };
    for mut group in groups {
        group.shuffle(&mut rng);
        let m = group.len();
        let mut n_test = (config.test_fraction * m as f64).round() as usize;
        if config.stratified && m >= 2 {
            n_test = n_test.clamp(1, m - 1);
        } else {
            n_test = n_test.min(m);
        }
        test.extend_from_slice(&group[..n_test]);
        train.extend_from_slice(&group[n_test..]);
    }
    if train.is_empty() || test.is_empty() {
        return invalid("split left the training or test set empty");
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn data(n: usize) -> LabeledDataset {
        let x = Array2::from_shape_fn((n, 2), |(i, j)| (i * 2 + j) as f64);
        let labels: Vec<String> = (0..n).map(|i| (i % 3).to_string()).collect();
        LabeledDataset::categorical(x, &labels).unwrap()
    }

    #[test]
    fn stratified_halves_each_class() {
        let d = data(60);
        let s = make_split(&d, &SplitConfig::default(), 0).unwrap();
        assert_eq!(s.train.len(), 30);
        assert_eq!(s.test.len(), 30);
        let codes = d.codes().unwrap();
        for c in 0..3 {
            assert_eq!(s.train.iter().filter(|&&i| codes[i] == c).count(), 10);
        }
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..60).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_per_replication() {
        let d = data(40);
        let cfg = SplitConfig::default();
        assert_eq!(make_split(&d, &cfg, 3).unwrap(), make_split(&d, &cfg, 3).unwrap());
        assert_ne!(make_split(&d, &cfg, 3).unwrap(), make_split(&d, &cfg, 4).unwrap());
    }

    #[test]
    fn plain_random_split() {
        let d = data(41);
        let cfg = SplitConfig {
            stratified: false,
            test_fraction: 0.25,
            ..Default::default()
        };
        let s = make_split(&d, &cfg, 0).unwrap();
        assert_eq!(s.test.len(), 10);
        assert_eq!(s.train.len(), 31);
    }

    #[test]
    fn rejects_bad_fraction() {
        let cfg = SplitConfig {
            test_fraction: 1.0,
            ..Default::default()
        };
        assert!(make_split(&data(10), &cfg, 0).is_err());
    }
}
