//! Reference linear reducers: sliced inverse regression (SIR), sliced
//! average variance estimation (SAVE) and PCA.
//!
//! SIR and SAVE use the classes themselves as slices and work on whitened
//! predictors; their bases are mapped back to the original coordinates.
//! The returned `singular_values` hold the full eigenvalue spectrum of the
//! kernel matrix (between-slice covariance for SIR, the SAVE kernel, the
//! sample covariance for PCA).

use std::sync::atomic::{AtomicBool, Ordering};

use log::{debug, warn};
use ndarray::{s, Array2, Axis};

use crate::dataset::LabeledDataset;
use crate::error::{invalid, PotdError, Result};
use crate::linalg::{apply_sign_convention, column_means, covariance, symmetric_eigen};
use crate::potd::Basis;
use crate::whitening::Whitener;

static SIR_CLAMP_WARNED: AtomicBool = AtomicBool::new(false);

/// SIR basis. `r` is clamped to `k - 1` because the between-slice covariance
/// of `k` slice means has rank at most `k - 1`. The first clamp in a process
/// logs a warning, later ones log at debug level.
pub fn sir_fit(data: &LabeledDataset, r: usize) -> Result<Basis> {
    check_dim(r, data.p())?;
    let k = data.require_classes()?;
    let r_eff = r.min(k - 1);
    if r_eff < r {
        let msg = format!("SIR can estimate at most {} directions with {k} classes; using {r_eff} instead of {r}", k - 1);
        if SIR_CLAMP_WARNED.swap(true, Ordering::Relaxed) {
            debug!("{msg}");
        } else {
            warn!("{msg}");
        }
    }
    let (z, whitener) = whitened(data)?;
    let n = data.n() as f64;
    let p = data.p();
    let mut kernel = Array2::<f64>::zeros((p, p));
    for c in 0..k {
        let rows = data.class_rows(c)?;
        let w = rows.len() as f64 / n;
        let mean = column_means(z.select(Axis(0), &rows).view());
        let outer = mean.view().insert_axis(Axis(1)).dot(&mean.view().insert_axis(Axis(0)));
        kernel = kernel + outer * w;
    }
    leading_in_whitened(&kernel, r_eff, &whitener)
}

/// SAVE basis: top eigenvectors of `Σ_s w_s (I - cov_s)²` on whitened
/// predictors, with `cov_s` the within-class covariance (divisor `n_s`) and
/// `w_s` the class proportion.
pub fn save_fit(data: &LabeledDataset, r: usize) -> Result<Basis> {
    check_dim(r, data.p())?;
    let k = data.require_classes()?;
    let counts = data.class_counts()?;
    if let Some(c) = counts.iter().position(|&m| m < 2) {
        return Err(PotdError::Degenerate(format!(
            "class '{}' has a single point; its covariance is undefined",
            data.class_names()?[c]
        )));
    }
    let (z, whitener) = whitened(data)?;
    let n = data.n() as f64;
    let p = data.p();
    let identity = Array2::<f64>::eye(p);
    let mut kernel = Array2::<f64>::zeros((p, p));
    for c in 0..k {
        let rows = data.class_rows(c)?;
        let w = rows.len() as f64 / n;
        let cov = covariance(z.select(Axis(0), &rows).view());
        let d = &identity - &cov;
        kernel = kernel + d.dot(&d) * w;
    }
    leading_in_whitened(&kernel, r, &whitener)
}

/// Principal components of the centered predictors.
pub fn pca_fit(x: &Array2<f64>, r: usize) -> Result<Basis> {
    check_dim(r, x.ncols())?;
    if x.nrows() < 2 {
        return invalid("PCA needs at least two samples");
    }
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("non-finite predictor value");
    }
    let cov = covariance(x.view());
    let (values, vectors) = symmetric_eigen(cov.view())?;
    let mut v = vectors.slice(s![.., ..r]).to_owned();
    apply_sign_convention(&mut v);
    Basis::new(v, values, false)
}

fn check_dim(r: usize, p: usize) -> Result<()> {
    if r == 0 || r > p {
        return invalid(format!("structure dimension must be in 1..={p}, got {r}"));
    }
    Ok(())
}

fn whitened(data: &LabeledDataset) -> Result<(Array2<f64>, Whitener)> {
    let w = Whitener::fit(data.x())?;
    Ok((w.transform(data.x())?, w))
}

fn leading_in_whitened(kernel: &Array2<f64>, r: usize, whitener: &Whitener) -> Result<Basis> {
    let (values, vectors) = symmetric_eigen(kernel.view())?;
    let v = whitener.back_transform_basis(vectors.slice(s![.., ..r]))?;
    Basis::new(v, values, true)
}
