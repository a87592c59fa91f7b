//! Distances between estimated and reference subspaces.

use ndarray::{Array2, ArrayView2};

use crate::error::{invalid, Result};
use crate::linalg::frobenius_norm;
use crate::potd::Basis;

/// Reference subspace of a synthetic model, as orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueSubspace {
    basis: Array2<f64>,
}

impl TrueSubspace {
    /// `span(e_1, …, e_r)` in `R^p`.
    pub fn canonical(p: usize, r: usize) -> Result<Self> {
        if r == 0 || r > p {
            return invalid(format!("cannot embed {r} coordinate axes in R^{p}"));
        }
        Ok(TrueSubspace {
            basis: Array2::from_shape_fn((p, r), |(i, j)| if i == j { 1.0 } else { 0.0 }),
        })
    }

    pub fn from_basis(basis: Array2<f64>) -> Result<Self> {
        let gram = basis.t().dot(&basis);
        for ((i, j), v) in gram.indexed_iter() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (v - want).abs() > 1e-8 {
                return invalid("reference basis is not orthonormal");
            }
        }
        Ok(TrueSubspace { basis })
    }

    pub fn basis(&self) -> ArrayView2<'_, f64> {
        self.basis.view()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }
}

/// `‖(I - B̂B̂ᵀ) B₀‖_F`: the part of the reference basis left outside the
/// estimated span. Ranges over `[0, √r₀]`.
pub fn subspace_distance(estimated: &Basis, truth: &TrueSubspace) -> Result<f64> {
    if estimated.ambient_dim() != truth.ambient_dim() {
        return invalid(format!(
            "estimated basis lives in R^{}, reference in R^{}",
            estimated.ambient_dim(),
            truth.ambient_dim()
        ));
    }
    Ok(projection_residual(estimated.vectors(), truth.basis()))
}

/// `‖P_V (I - P_V̂)‖_F` for two bases of equal dimension.
pub fn sin_distance(v: &Basis, v_hat: &Basis) -> Result<f64> {
    if v.ambient_dim() != v_hat.ambient_dim() || v.dim() != v_hat.dim() {
        return invalid(format!(
            "bases have shapes {}x{} and {}x{}",
            v.ambient_dim(),
            v.dim(),
            v_hat.ambient_dim(),
            v_hat.dim()
        ));
    }
    // ‖V Vᵀ (I - P)‖ = ‖Vᵀ (I - P)‖ = ‖(I - P) V‖ for orthonormal V
    Ok(projection_residual(v_hat.vectors(), v.vectors()))
}

/// `‖(I - A Aᵀ) B‖_F` for orthonormal `A`.
fn projection_residual(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    let inside = a.dot(&a.t().dot(&b));
    frobenius_norm((&b - &inside).view())
}
