//! Synthetic binary-response data.
//!
//! Models I–IV draw `X ~ UNIF[-2, 2]^p` and label by the sign of a nonlinear
//! function of the first two or four coordinates plus Gaussian noise:
//!
//! | model | response                                        | truth            |
//! |-------|-------------------------------------------------|------------------|
//! | I     | `sign{sin(X1) / X2² + s·ε}`                     | `span(e1, e2)`   |
//! | II    | `sign{(X1 + 0.5)(X2 - 0.5)² + s·ε}`             | `span(e1, e2)`   |
//! | III   | `sign{log(X1²)(X2² + X3²/2 + X4²/4) + s·ε}`     | `span(e1..e4)`   |
//! | IV    | `sign{sin(X1) / (X2 X3 X4) + s·ε}`              | `span(e1..e4)`   |
//!
//! with `s = noise_scale` (0.2 by default). Points where a denominator or the
//! logarithm's argument is exactly zero are redrawn, and `sign(0) = +1`.
//!
//! `cshape` draws two interleaved noisy arcs of radius 20 in the first two
//! coordinates (class 1 centred on angle π and shifted by +1 in `X1`, class 2
//! centred on angle 0) with standard normal noise elsewhere; each class is then
//! standardized on its own. `svm3d` draws two Gaussian classes in `R^3` with
//! means `±(0, 0.5, 0)` and variances 4 and 1 along the first axis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis};
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{invalid, PotdError, Result};
use crate::linalg::{column_means, covariance};
use crate::metrics::TrueSubspace;
use crate::rng::{seeded, SeededRng};

pub const DEFAULT_NOISE_SCALE: f64 = 0.2;
pub const CSHAPE_DEFAULT_P: usize = 10;
const SVM3D_MEAN_OFFSET: f64 = 0.5;
const SVM3D_SD_RATIO: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    I,
    II,
    III,
    IV,
    #[serde(rename = "cshape")]
    CShape,
    #[serde(rename = "svm3d")]
    Svm3d,
}

impl Model {
    pub const BENCHMARK: [Model; 4] = [Model::I, Model::II, Model::III, Model::IV];

    /// Dimension of the reference subspace.
    pub fn true_dim(self) -> usize {
        match self {
            Model::I | Model::II | Model::CShape | Model::Svm3d => 2,
            Model::III | Model::IV => 4,
        }
    }

    pub fn min_p(self) -> usize {
        match self {
            Model::Svm3d => 3,
            other => other.true_dim(),
        }
    }

    fn id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Model::I => "I",
            Model::II => "II",
            Model::III => "III",
            Model::IV => "IV",
            Model::CShape => "cshape",
            Model::Svm3d => "svm3d",
        };
        f.write_str(s)
    }
}

impl FromStr for Model {
    type Err = PotdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Model::I),
            "ii" | "2" => Ok(Model::II),
            "iii" | "3" => Ok(Model::III),
            "iv" | "4" => Ok(Model::IV),
            "cshape" | "c-shape" => Ok(Model::CShape),
            "svm3d" => Ok(Model::Svm3d),
            other => invalid(format!(
                "unknown model '{other}' (valid: I, II, III, IV, cshape, svm3d)"
            )),
        }
    }
}

/// Per-class or pooled standardization for the C-shape example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Standardization {
    #[default]
    PerClass,
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub model: Model,
    /// Total sample size for models I–IV; per-class size for `cshape` and `svm3d`.
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub noise_scale: f64,
    pub standardization: Standardization,
}

impl SyntheticSpec {
    pub fn new(model: Model, n: usize, p: usize, seed: u64) -> Self {
        SyntheticSpec {
            model,
            n,
            p,
            seed,
            noise_scale: DEFAULT_NOISE_SCALE,
            standardization: Standardization::PerClass,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < self.model.min_p() {
            return invalid(format!(
                "model {} needs p >= {}, got {}",
                self.model,
                self.model.min_p(),
                self.p
            ));
        }
        if self.model == Model::Svm3d && self.p != 3 {
            return invalid("svm3d is defined in R^3");
        }
        if self.n < 2 {
            return invalid("need at least two samples");
        }
        if !(self.noise_scale >= 0.0) {
            return invalid("noise_scale must be nonnegative");
        }
        Ok(())
    }

    /// Seed for a derived replication of this spec.
    pub fn stream_id(&self) -> [u64; 2] {
        [self.model.id(), self.p as u64]
    }
}

/// Generate any synthetic model.
pub fn generate(spec: &SyntheticSpec) -> Result<(LabeledDataset, TrueSubspace)> {
    spec.validate()?;
    match spec.model {
        Model::CShape => gen_cshape_with(spec.n, spec.p, spec.seed, spec.standardization),
        Model::Svm3d => gen_svm3d(spec.n, spec.seed),
        _ => gen_model(spec),
    }
}

/// Models I–IV.
pub fn gen_model(spec: &SyntheticSpec) -> Result<(LabeledDataset, TrueSubspace)> {
    spec.validate()?;
    if !Model::BENCHMARK.contains(&spec.model) {
        return invalid(format!("gen_model handles models I-IV, got {}", spec.model));
    }
    let mut rng = seeded(spec.seed);
    let unif = Uniform::new_inclusive(-2.0, 2.0).map_err(|e| PotdError::InvalidInput(e.to_string()))?;
    let normal = Normal::new(0.0, 1.0).map_err(|e| PotdError::InvalidInput(e.to_string()))?;
    let mut x = Array2::zeros((spec.n, spec.p));
    let mut labels = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let y = loop {
            for j in 0..spec.p {
                x[[i, j]] = unif.sample(&mut rng);
            }
            let eps: f64 = normal.sample(&mut rng);
            let row = x.row(i);
            if let Some(signal) = model_signal(spec.model, row.as_slice().unwrap()) {
                break sign(signal + spec.noise_scale * eps);
            }
        };
        labels.push(if y > 0.0 { "1" } else { "-1" });
    }
    let data = LabeledDataset::categorical(x, &labels)?;
    let truth = TrueSubspace::canonical(spec.p, spec.model.true_dim())?;
    Ok((data, truth))
}

/// Noise-free part of the response; `None` where it is undefined.
pub fn model_signal(model: Model, x: &[f64]) -> Option<f64> {
    let v = match model {
        Model::I => {
            let d = x[1] * x[1];
            if d == 0.0 {
                return None;
            }
            x[0].sin() / d
        }
        Model::II => (x[0] + 0.5) * (x[1] - 0.5).powi(2),
        Model::III => {
            let s = x[0] * x[0];
            if s == 0.0 {
                return None;
            }
            s.ln() * (x[1] * x[1] + x[2] * x[2] / 2.0 + x[3] * x[3] / 4.0)
        }
        Model::IV => {
            let d = x[1] * x[2] * x[3];
            if d == 0.0 {
                return None;
            }
            x[0].sin() / d
        }
        Model::CShape | Model::Svm3d => return None,
    };
    v.is_finite().then_some(v)
}

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// The two-arc example in `R^10` with per-class standardization.
pub fn gen_cshape(n_per_class: usize, seed: u64) -> Result<(LabeledDataset, TrueSubspace)> {
    gen_cshape_with(n_per_class, CSHAPE_DEFAULT_P, seed, Standardization::PerClass)
}

pub fn gen_cshape_with(
    n_per_class: usize,
    p: usize,
    seed: u64,
    standardization: Standardization,
) -> Result<(LabeledDataset, TrueSubspace)> {
    if n_per_class < 10 {
        return invalid(format!("cshape needs at least 10 points per class, got {n_per_class}"));
    }
    if p < 2 {
        return invalid("cshape needs p >= 2");
    }
    let raw = cshape_raw(n_per_class, p, &mut seeded(seed))?;
    let x = match standardization {
        Standardization::PerClass => {
            let top = standardize(raw.slice(ndarray::s![..n_per_class, ..]).to_owned())?;
            let bottom = standardize(raw.slice(ndarray::s![n_per_class.., ..]).to_owned())?;
            ndarray::concatenate(Axis(0), &[top.view(), bottom.view()]).expect("equal widths")
        }
        Standardization::Pooled => standardize(raw)?,
    };
    let labels: Vec<&str> = (0..2 * n_per_class)
        .map(|i| if i < n_per_class { "1" } else { "2" })
        .collect();
    let data = LabeledDataset::categorical(x, &labels)?;
    Ok((data, TrueSubspace::canonical(p, 2)?))
}

/// Unstandardized arcs: rows `0..n` are class 1, the rest class 2.
pub fn cshape_raw(n_per_class: usize, p: usize, rng: &mut SeededRng) -> Result<Array2<f64>> {
    let std_normal = Normal::new(0.0, 1.0).map_err(|e| PotdError::InvalidInput(e.to_string()))?;
    let mut x = Array2::zeros((2 * n_per_class, p));
    for class in 0..2 {
        let (centre, shift) = if class == 0 { (PI, 1.0) } else { (0.0, 0.0) };
        let angle = Normal::new(centre, 0.25 * PI).map_err(|e| PotdError::InvalidInput(e.to_string()))?;
        for i in 0..n_per_class {
            let row = class * n_per_class + i;
            let theta: f64 = angle.sample(rng);
            let z1: f64 = std_normal.sample(rng);
            let z2: f64 = std_normal.sample(rng);
            x[[row, 0]] = 20.0 * theta.cos() + z1 + shift;
            x[[row, 1]] = 20.0 * theta.sin() + z2;
            for j in 2..p {
                x[[row, j]] = std_normal.sample(rng);
            }
        }
    }
    Ok(x)
}

/// Column means 0 and variances 1 (divisor `n`).
pub fn standardize(mut x: Array2<f64>) -> Result<Array2<f64>> {
    let mean = column_means(x.view());
    let cov = covariance(x.view());
    for j in 0..x.ncols() {
        let sd = cov[[j, j]].sqrt();
        if !(sd > 0.0) {
            return Err(PotdError::Degenerate(format!("column {} is constant", j + 1)));
        }
        x.column_mut(j).mapv_inplace(|v| (v - mean[j]) / sd);
    }
    Ok(x)
}

/// Two Gaussian classes with equal covariance apart from a 2:1 standard
/// deviation ratio along `e1`, and means `±(0, 0.5, 0)`.
pub fn gen_svm3d(n_per_class: usize, seed: u64) -> Result<(LabeledDataset, TrueSubspace)> {
    if n_per_class < 2 {
        return invalid("svm3d needs at least two points per class");
    }
    let mut rng = seeded(seed);
    let normal = Normal::new(0.0, 1.0).map_err(|e| PotdError::InvalidInput(e.to_string()))?;
    let mut x = Array2::zeros((2 * n_per_class, 3));
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for i in 0..2 * n_per_class {
        let first = i < n_per_class;
        let (offset, sd1) = if first {
            (SVM3D_MEAN_OFFSET, SVM3D_SD_RATIO)
        } else {
            (-SVM3D_MEAN_OFFSET, 1.0)
        };
        x[[i, 0]] = sd1 * normal.sample(&mut rng);
        x[[i, 1]] = offset + normal.sample(&mut rng);
        x[[i, 2]] = normal.sample(&mut rng);
        labels.push(if first { "1" } else { "2" });
    }
    let data = LabeledDataset::categorical(x, &labels)?;
    Ok((data, TrueSubspace::canonical(3, 2)?))
}
