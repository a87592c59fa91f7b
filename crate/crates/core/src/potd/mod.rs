//! Principal optimal transport directions.
//!
//! For each ordered class pair `(i, j)` the optimal coupling `G_ij` between
//! the two weighted class clouds gives the displacement matrix
//! `Δ_ij = diag(a_i) X_(i) - G_ij X_(j)`. All `Δ_ij` are stacked into `Λ`
//! (outer loop over `i`, inner over `j ≠ i`) and the leading right singular
//! vectors of `Λ` span the estimated reduction subspace. The singular vectors
//! come from the `p × p` Gram matrix `ΛᵀΛ`.

mod dimension;
mod displacement;

pub use dimension::{estimate_dimension, DEFAULT_DIMENSION_THRESHOLD};
pub use displacement::{displacement_matrix, second_order_displacement, DisplacementMatrix, SecondOrderDisplacement};

use log::warn;
use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rayon::prelude::*;

use crate::dataset::LabeledDataset;
use crate::error::{invalid, PotdError, Result};
use crate::linalg::{apply_sign_convention, symmetric_eigen};
use crate::ot::{self, SolverConfig};
use crate::whitening::Whitener;

/// Singular values below this fraction of the largest count as zero.
const RANK_TOLERANCE: f64 = 1e-7;
const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

/// Orthonormal `p × r` basis of an estimated subspace, in original predictor
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Array2<f64>,
    singular_values: Array1<f64>,
    whitening_applied: bool,
}

impl Basis {
    /// Wrap orthonormal columns. Spectrum values are clamped at zero.
    pub fn new(vectors: Array2<f64>, singular_values: Array1<f64>, whitening_applied: bool) -> Result<Self> {
        Self::from_parts(vectors, singular_values, whitening_applied)
    }

    pub(crate) fn from_parts(vectors: Array2<f64>, singular_values: Array1<f64>, whitening_applied: bool) -> Result<Self> {
        let r = vectors.ncols();
        if r == 0 || vectors.nrows() < r {
            return invalid(format!("a basis needs 1..=p columns, got {:?}", vectors.dim()));
        }
        let gram = vectors.t().dot(&vectors);
        for ((i, j), v) in gram.indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (v - want).abs() > ORTHONORMAL_TOLERANCE {
                return invalid(format!("basis columns are not orthonormal (gram[{i},{j}] = {v})"));
            }
        }
        Ok(Basis {
            vectors,
            singular_values: singular_values.mapv(|s| s.max(0.0)),
            whitening_applied,
        })
    }

    /// Orthonormalize arbitrary independent columns into a basis of their span.
    pub fn spanning(columns: &Array2<f64>) -> Result<Self> {
        let mut q = crate::linalg::orthonormalize_columns(columns)?;
        apply_sign_convention(&mut q);
        Self::from_parts(q, Array1::zeros(0), false)
    }

    pub fn vectors(&self) -> ArrayView2<'_, f64> {
        self.vectors.view()
    }

    pub fn singular_values(&self) -> &Array1<f64> {
        &self.singular_values
    }

    pub fn whitening_applied(&self) -> bool {
        self.whitening_applied
    }

    /// Number of directions `r`.
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// Ambient dimension `p`.
    pub fn ambient_dim(&self) -> usize {
        self.vectors.nrows()
    }
}

/// All displacement blocks of a fit, in stacking order.
#[derive(Debug, Clone)]
pub struct DisplacementStack {
    pub blocks: Vec<DisplacementMatrix>,
    whitener: Option<Whitener>,
    p: usize,
}

impl DisplacementStack {
    pub fn rows(&self) -> usize {
        self.blocks.iter().map(|b| b.rows.nrows()).sum()
    }

    /// The stacked matrix `Λ`.
    pub fn lambda(&self) -> Array2<f64> {
        let views: Vec<_> = self.blocks.iter().map(|b| b.rows.view()).collect();
        concatenate(Axis(0), &views).unwrap_or_else(|_| Array2::zeros((0, self.p)))
    }

    /// `ΛᵀΛ`, accumulated block by block in stacking order.
    pub fn gram(&self) -> Array2<f64> {
        let mut g = Array2::zeros((self.p, self.p));
        for b in &self.blocks {
            g = g + b.rows.t().dot(&b.rows);
        }
        g
    }

    pub fn whitener(&self) -> Option<&Whitener> {
        self.whitener.as_ref()
    }

    /// Leading right singular vectors of `Λ` (mapped back to the original
    /// coordinates when the stack was built on whitened data). `r` is capped at
    /// the numerical rank of `Λ`.
    pub fn basis(&self, r: usize) -> Result<Basis> {
        if r == 0 || r > self.p {
            return invalid(format!("structure dimension must be in 1..={}, got {r}", self.p));
        }
        let (eigenvalues, eigenvectors) = symmetric_eigen(self.gram().view())?;
        let keep = self.p.min(self.rows());
        let singular: Array1<f64> = eigenvalues.iter().take(keep).map(|&l| l.max(0.0).sqrt()).collect();
        let top = singular.first().copied().unwrap_or(0.0);
        if !(top > 0.0) {
            return Err(PotdError::Degenerate(
                "all displacement vectors vanish; the classes coincide".into(),
            ));
        }
        let rank = singular.iter().filter(|&&s| s > RANK_TOLERANCE * top).count();
        let r_eff = if r > rank {
            warn!("requested {r} directions but the displacement stack has rank {rank}; using {rank}");
            rank
        } else {
            r
        };
        let leading = eigenvectors.slice(s![.., ..r_eff]);
        let vectors = match &self.whitener {
            Some(w) => w.back_transform_basis(leading)?,
            None => {
                let mut v = leading.to_owned();
                apply_sign_convention(&mut v);
                v
            }
        };
        Basis::from_parts(vectors, singular, self.whitener.is_some())
    }
}

/// Build every displacement block of the one-vs-one scheme.
pub fn displacement_stack(data: &LabeledDataset, solver: &SolverConfig, whiten: bool) -> Result<DisplacementStack> {
    solver.validate()?;
    data.require_classes()?;
    let (features, whitener) = features_for(data, whiten)?;
    let blocks = class_pair_blocks(data, features.view(), solver)?;
    Ok(DisplacementStack {
        blocks,
        whitener,
        p: data.p(),
    })
}

/// Fit the POTD basis of dimension `r`.
pub fn potd_fit(data: &LabeledDataset, r: usize, solver: &SolverConfig, whiten: bool) -> Result<Basis> {
    if r == 0 || r > data.p() {
        return invalid(format!("structure dimension must be in 1..={}, got {r}", data.p()));
    }
    displacement_stack(data, solver, whiten)?.basis(r)
}

/// POTD for a real-valued response: every cut `c` splits the sample into
/// `{y < c}` and `{y >= c}`, both displacement blocks of each split are
/// pooled, and the leading directions of the pooled stack are returned.
pub fn potd_fit_continuous(
    data: &LabeledDataset,
    r: usize,
    cuts: &[f64],
    solver: &SolverConfig,
    whiten: bool,
) -> Result<Basis> {
    let y = data.continuous_response()?;
    if cuts.is_empty() {
        return invalid("at least one cut is required");
    }
    if r == 0 || r > data.p() {
        return invalid(format!("structure dimension must be in 1..={}, got {r}", data.p()));
    }
    solver.validate()?;
    let (features, whitener) = features_for(data, whiten)?;
    let mut blocks = Vec::new();
    for &cut in cuts {
        let binary = binarize(data, y, cut)?;
        blocks.extend(class_pair_blocks(&binary, features.view(), solver)?);
    }
    DisplacementStack {
        blocks,
        whitener,
        p: data.p(),
    }
    .basis(r)
}

/// Two-class dataset with code 0 for `y < cut` and 1 otherwise.
pub fn binarize(data: &LabeledDataset, y: &[f64], cut: f64) -> Result<LabeledDataset> {
    let codes: Vec<usize> = y.iter().map(|&v| usize::from(v >= cut)).collect();
    let upper = codes.iter().sum::<usize>();
    if upper == 0 || upper == codes.len() {
        return invalid(format!("cut {cut} leaves one side empty"));
    }
    LabeledDataset::from_codes(
        data.x().to_owned(),
        codes,
        vec![format!("<{cut}"), format!(">={cut}")],
    )
}

/// Empirical quantiles (linear interpolation between order statistics).
pub fn quantile_cuts(y: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if y.is_empty() {
        return invalid("empty response");
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    probs
        .iter()
        .map(|&q| {
            if !(0.0..=1.0).contains(&q) {
                return invalid(format!("quantile level {q} outside [0, 1]"));
            }
            let h = q * (sorted.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
        })
        .collect()
}

/// Default cut levels for the continuous extension.
pub const DEFAULT_CUT_QUANTILES: [f64; 2] = [1.0 / 3.0, 2.0 / 3.0];

/// `X · B` for each sample.
pub fn project(x: ArrayView2<'_, f64>, basis: &Basis) -> Result<Array2<f64>> {
    if x.ncols() != basis.ambient_dim() {
        return invalid(format!(
            "data has {} columns but the basis lives in R^{}",
            x.ncols(),
            basis.ambient_dim()
        ));
    }
    Ok(x.dot(&basis.vectors()))
}

fn features_for(data: &LabeledDataset, whiten: bool) -> Result<(Array2<f64>, Option<Whitener>)> {
    if whiten {
        let w = Whitener::fit(data.x())?;
        Ok((w.transform(data.x())?, Some(w)))
    } else {
        Ok((data.x().to_owned(), None))
    }
}

fn class_pair_blocks(
    data: &LabeledDataset,
    features: ArrayView2<'_, f64>,
    solver: &SolverConfig,
) -> Result<Vec<DisplacementMatrix>> {
    let k = data.require_classes()?;
    let measures = (0..k)
        .map(|c| data.class_measure(features, c))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    // rayon's indexed collect keeps the sequential stacking order
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let coupling = ot::solve(&measures[i], &measures[j], solver)?;
            let mut block = displacement_matrix(&measures[i], &measures[j], &coupling)?;
            block.source_class = i;
            block.target_class = j;
            Ok(block)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_single_point_classes_span_the_difference() {
        let x = array![[1.0, 1.0], [4.0, 5.0]];
        let data = LabeledDataset::categorical(x, &["a", "b"]).unwrap();
        let basis = potd_fit(&data, 1, &SolverConfig::exact(), false).unwrap();
        let v = basis.vectors();
        assert!((v[[0, 0]] - 0.6).abs() < 1e-12 && (v[[1, 0]] - 0.8).abs() < 1e-12);
        // r = 2 is capped at the rank of the single displacement
        let capped = potd_fit(&data, 2, &SolverConfig::exact(), false).unwrap();
        assert_eq!(capped.dim(), 1);
    }

    #[test]
    fn collinear_classes_recover_the_line() {
        let dir = array![1.0, 2.0, 2.0] / 3.0;
        let ts = [[-3.0, -2.5, -1.0, -0.2], [0.1, 0.5, 1.5, 2.0], [3.0, 4.0, 4.2, 5.5]];
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (c, group) in ts.iter().enumerate() {
            for &t in group {
                rows.extend((&dir * t).to_vec());
                labels.push(c.to_string());
            }
        }
        let x = Array2::from_shape_vec((12, 3), rows).unwrap();
        let data = LabeledDataset::categorical(x, &labels).unwrap();
        let basis = potd_fit(&data, 1, &SolverConfig::exact(), false).unwrap();
        let align = basis.vectors().column(0).dot(&dir).abs();
        assert!((align - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_dimension_and_labels() {
        let x = array![[1.0, 1.0], [4.0, 5.0]];
        let data = LabeledDataset::categorical(x.clone(), &["a", "b"]).unwrap();
        assert!(potd_fit(&data, 3, &SolverConfig::exact(), false).is_err());
        assert!(potd_fit(&data, 0, &SolverConfig::exact(), false).is_err());
        let cont = LabeledDataset::continuous(x, vec![1.0, 2.0]).unwrap();
        assert!(potd_fit(&cont, 1, &SolverConfig::exact(), false).is_err());
    }

    #[test]
    fn coincident_classes_are_degenerate() {
        let x = array![[1.0, 1.0], [1.0, 1.0]];
        let data = LabeledDataset::categorical(x, &["a", "b"]).unwrap();
        assert!(matches!(
            potd_fit(&data, 1, &SolverConfig::exact(), false),
            Err(PotdError::Degenerate(_))
        ));
    }

    #[test]
    fn quantiles_interpolate() {
        let y = [4.0, 1.0, 3.0, 2.0];
        let q = quantile_cuts(&y, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(q, vec![1.0, 2.5, 4.0]);
    }

    #[test]
    fn empty_cut_side_named() {
        let x = array![[1.0], [2.0], [3.0]];
        let data = LabeledDataset::continuous(x, vec![1.0, 2.0, 3.0]).unwrap();
        let err = potd_fit_continuous(&data, 1, &[10.0], &SolverConfig::exact(), false).unwrap_err();
        assert!(err.to_string().contains("cut 10"));
    }

    #[test]
    fn project_examples() {
        let x = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let b = Basis::new(array![[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], Array1::zeros(2), false).unwrap();
        assert_eq!(project(x.view(), &b).unwrap(), array![[1.0, 2.0], [4.0, 5.0]]);
        assert_eq!(project(Array2::zeros((3, 3)).view(), &b).unwrap(), Array2::<f64>::zeros((3, 2)));
        assert!(project(array![[1.0, 2.0]].view(), &b).is_err());
    }

    #[test]
    fn basis_rejects_non_orthonormal() {
        assert!(Basis::new(array![[1.0, 1.0], [0.0, 1.0]], Array1::zeros(2), false).is_err());
    }
}
