//! Centering and whitening of predictor matrices.
//!
//! The estimators work in coordinates where the sample covariance is the
//! identity: `Z = (X - mean) Σ^{-1/2}`. Directions found in those coordinates
//! map back through `Σ^{-1/2}` and are then re-orthonormalized.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{invalid, PotdError, Result};
use crate::linalg::{apply_sign_convention, column_means, covariance, orthonormalize_columns, symmetric_eigen};

/// Relative eigenvalue floor below which the covariance counts as singular.
const RANK_TOLERANCE: f64 = 1e-10;

/// A fitted whitening transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Whitener {
    mean: Array1<f64>,
    inv_sqrt: Array2<f64>,
}

impl Whitener {
    pub fn fit(x: ArrayView2<'_, f64>) -> Result<Self> {
        let (n, p) = x.dim();
        if n <= p {
            return invalid(format!("whitening needs more samples than predictors (n = {n}, p = {p})"));
        }
        let mean = column_means(x);
        let cov = covariance(x);
        let (vals, vecs) = symmetric_eigen(cov.view())?;
        let top = vals[0].max(0.0);
        let null: Vec<usize> = (0..p).filter(|&j| !(vals[j] > RANK_TOLERANCE * top) || top == 0.0).collect();
        if !null.is_empty() {
            let described: Vec<String> = null
                .iter()
                .map(|&j| {
                    let coords: Vec<String> = (0..p)
                        .filter(|&i| vecs[[i, j]].abs() > 0.1)
                        .map(|i| format!("x{}:{:+.3}", i + 1, vecs[[i, j]]))
                        .collect();
                    format!("[{}]", coords.join(" "))
                })
                .collect();
            return Err(PotdError::Degenerate(format!(
                "sample covariance is rank deficient; null directions {}",
                described.join(", ")
            )));
        }
        let scaled = Array2::from_shape_fn((p, p), |(i, j)| vecs[[i, j]] / vals[j].sqrt());
        let inv_sqrt = scaled.dot(&vecs.t());
        Ok(Whitener { mean, inv_sqrt })
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    /// `Σ^{-1/2}`, which also maps whitened directions back to the original
    /// predictor coordinates.
    pub fn back_transform(&self) -> &Array2<f64> {
        &self.inv_sqrt
    }

    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.mean.len() {
            return invalid(format!(
                "whitener fitted on {} predictors, got {}",
                self.mean.len(),
                x.ncols()
            ));
        }
        Ok((&x - &self.mean).dot(&self.inv_sqrt))
    }

    /// Map directions estimated in whitened coordinates (columns of `v`) to
    /// an orthonormal basis in the original coordinates, with the sign
    /// convention applied.
    pub fn back_transform_basis(&self, v: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let raw = self.inv_sqrt.dot(&v);
        let mut q = orthonormalize_columns(&raw)?;
        apply_sign_convention(&mut q);
        Ok(q)
    }
}

/// Whiten `x`, returning the whitened matrix and the back-transform `Σ^{-1/2}`.
pub fn whiten(x: ArrayView2<'_, f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    let w = Whitener::fit(x)?;
    let z = w.transform(x)?;
    Ok((z, w.inv_sqrt))
}
