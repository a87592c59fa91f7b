use ndarray::{Array1, Array2, Axis};

use super::Basis;
use crate::error::{invalid, PotdError, Result};
use crate::linalg::{apply_sign_convention, symmetric_eigen};
use crate::ot::{barycentric_projection, CouplingMatrix, DiscreteMeasure};

/// Weighted displacement vectors `diag(a_i) X_(i) - G_ij X_(j)` of one
/// ordered class pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementMatrix {
    pub rows: Array2<f64>,
    pub source_class: usize,
    pub target_class: usize,
}

impl DisplacementMatrix {
    pub fn column_sums(&self) -> Array1<f64> {
        self.rows.sum_axis(Axis(0))
    }
}

pub fn displacement_matrix(
    source: &DiscreteMeasure,
    target: &DiscreteMeasure,
    coupling: &CouplingMatrix,
) -> Result<DisplacementMatrix> {
    check_shapes(source, target, coupling)?;
    let image = barycentric_projection(coupling, target.points())?;
    let weighted = &source.points() * &source.weights().insert_axis(Axis(1));
    Ok(DisplacementMatrix {
        rows: weighted - image,
        source_class: 0,
        target_class: 1,
    })
}

fn check_shapes(source: &DiscreteMeasure, target: &DiscreteMeasure, coupling: &CouplingMatrix) -> Result<()> {
    if coupling.nrows() != source.len() || coupling.ncols() != target.len() {
        return invalid(format!(
            "coupling is {}x{} but measures have {} and {} points",
            coupling.nrows(),
            coupling.ncols(),
            source.len(),
            target.len()
        ));
    }
    if source.dim() != target.dim() {
        return invalid(format!(
            "source points live in R^{}, target points in R^{}",
            source.dim(),
            target.dim()
        ));
    }
    Ok(())
}

/// Empirical second moment of the transport displacements between two
/// classes, with its eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderDisplacement {
    pub sigma: Array2<f64>,
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

impl SecondOrderDisplacement {
    /// The leading `r` eigenvectors as a basis.
    pub fn leading_subspace(&self, r: usize) -> Result<Basis> {
        let p = self.sigma.nrows();
        if r == 0 || r > p {
            return invalid(format!("requested {r} directions in R^{p}"));
        }
        let mut v = self.eigenvectors.slice(ndarray::s![.., ..r]).to_owned();
        apply_sign_convention(&mut v);
        Basis::from_parts(v, self.eigenvalues.clone(), false)
    }
}

/// `n_source⁻¹ Σ_l (x_l - φ(x_l))(x_l - φ(x_l))ᵀ` where the image `φ(x_l)` is
/// the barycentric projection of point `l` divided by its mass.
pub fn second_order_displacement(
    source: &DiscreteMeasure,
    target: &DiscreteMeasure,
    coupling: &CouplingMatrix,
) -> Result<SecondOrderDisplacement> {
    check_shapes(source, target, coupling)?;
    let image = barycentric_projection(coupling, target.points())?;
    let (n, p) = (source.len(), source.dim());
    let mut diffs = Array2::zeros((n, p));
    for l in 0..n {
        let a = source.weights()[l];
        if !(a > 0.0) {
            return Err(PotdError::Degenerate(format!(
                "source point {l} has zero mass, its transport image is undefined"
            )));
        }
        for j in 0..p {
            diffs[[l, j]] = source.points()[[l, j]] - image[[l, j]] / a;
        }
    }
    let mut sigma = diffs.t().dot(&diffs) / n as f64;
    // exact symmetry
    for i in 0..p {
        for j in 0..i {
            let avg = 0.5 * (sigma[[i, j]] + sigma[[j, i]]);
            sigma[[i, j]] = avg;
            sigma[[j, i]] = avg;
        }
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(sigma.view())?;
    Ok(SecondOrderDisplacement {
        sigma,
        eigenvalues,
        eigenvectors,
    })
}
