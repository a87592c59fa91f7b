//! Small dense linear-algebra helpers shared by the estimators.
//!
//! Matrices are `ndarray` throughout; symmetric eigendecompositions are
//! delegated to `nalgebra`.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{PotdError, Result};

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted
/// nonincreasing. Column `j` of the returned matrix pairs with value `j`.
pub fn symmetric_eigen(m: ArrayView2<'_, f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let p = m.nrows();
    if p != m.ncols() {
        return Err(PotdError::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(PotdError::Numeric("non-finite entry in symmetric matrix".into()));
    }
    // symmetrize against round-off before handing to the solver
    let dm = DMatrix::from_fn(p, p, |i, j| 0.5 * (m[[i, j]] + m[[j, i]]));
    let eig = dm.symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = Array1::from_iter(order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = Array2::from_shape_fn((p, p), |(i, j)| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Flip column signs so that the entry of largest magnitude in each column is
/// positive. Ties go to the lowest row index.
pub fn apply_sign_convention(v: &mut Array2<f64>) {
    for mut col in v.axis_iter_mut(Axis(1)) {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > best_abs {
                best_abs = x.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Column order is
/// preserved, so the span of the first `j` output columns equals the span of
/// the first `j` input columns.
pub fn orthonormalize_columns(m: &Array2<f64>) -> Result<Array2<f64>> {
    let (p, r) = m.dim();
    let mut q = m.clone();
    for j in 0..r {
        let scale = m.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
        for _pass in 0..2 {
            for k in 0..j {
                let dot: f64 = (0..p).map(|i| q[[i, k]] * q[[i, j]]).sum();
                for i in 0..p {
                    q[[i, j]] -= dot * q[[i, k]];
                }
            }
        }
        let norm = q.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 1e-12 * scale.max(f64::MIN_POSITIVE)) || norm == 0.0 {
            return Err(PotdError::Degenerate(format!(
                "column {} is linearly dependent on the preceding columns",
                j + 1
            )));
        }
        q.column_mut(j).mapv_inplace(|x| x / norm);
    }
    Ok(q)
}

/// Column means of a data matrix.
pub fn column_means(x: ArrayView2<'_, f64>) -> Array1<f64> {
    x.mean_axis(Axis(0))
        .unwrap_or_else(|| Array1::zeros(x.ncols()))
}

/// Sample covariance with divisor `n`.
pub fn covariance(x: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    let mean = column_means(x);
    let centered = &x - &mean;
    centered.t().dot(&centered) / n
}

/// Orthogonal projector `V Vᵀ` onto the column span of an orthonormal `V`.
pub fn projector(v: ArrayView2<'_, f64>) -> Array2<f64> {
    v.dot(&v.t())
}

pub fn frobenius_norm(m: ArrayView2<'_, f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}
