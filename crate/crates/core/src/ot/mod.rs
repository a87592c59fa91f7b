//! Discrete optimal transport between weighted point clouds.
//!
//! Two solvers are provided. [`exact_ot`] solves the transportation linear
//! program to optimality (network simplex, with an assignment fast path for
//! uniform equal-size measures). [`sinkhorn`] solves the entropic relaxation
//! with log-domain updates and is meant for large class pairs.

mod assignment;
mod cost;
mod measure;
mod network_simplex;
mod sinkhorn;

pub use assignment::solve_assignment;
pub use cost::{squared_euclidean_cost, CostMatrix};
pub use measure::{CouplingMatrix, DiscreteMeasure};
pub use network_simplex::exact_ot;
pub use sinkhorn::{sinkhorn, SinkhornReport};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PotdError, Result};

/// Pair sizes up to this product are solved exactly under [`SolverMode::Auto`].
pub const AUTO_EXACT_LIMIT: usize = 250_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Exact,
    Sinkhorn,
    /// Exact when `n_i * n_j <= AUTO_EXACT_LIMIT`, Sinkhorn otherwise.
    Auto,
}

/// How the entropic regularization strength is chosen for a given cost matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum Epsilon {
    /// Fixed value in cost units.
    Absolute(f64),
    /// Multiple of the median cost entry.
    MedianScaled(f64),
    /// Multiple of the largest cost entry.
    MaxScaled(f64),
}

impl Epsilon {
    pub fn resolve(&self, cost: &CostMatrix) -> Result<f64> {
        let eps = match *self {
            Epsilon::Absolute(e) => e,
            Epsilon::MedianScaled(f) => f * cost.median(),
            Epsilon::MaxScaled(f) => f * cost.max(),
        };
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(PotdError::InvalidInput(format!(
                "entropic regularization must be positive, resolved to {eps}"
            )));
        }
        Ok(eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub epsilon: Epsilon,
    pub max_iterations: usize,
    pub marginal_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolverMode::Auto,
            epsilon: Epsilon::MedianScaled(0.05),
            max_iterations: 10_000,
            marginal_tolerance: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig {
            mode: SolverMode::Exact,
            ..Default::default()
        }
    }

    pub fn sinkhorn(epsilon: Epsilon) -> Self {
        SolverConfig {
            mode: SolverMode::Sinkhorn,
            epsilon,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.marginal_tolerance > 0.0) {
            return invalid("marginal_tolerance must be positive");
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive");
        }
        let positive = match self.epsilon {
            Epsilon::Absolute(e) | Epsilon::MedianScaled(e) | Epsilon::MaxScaled(e) => e > 0.0,
        };
        if self.mode != SolverMode::Exact && !positive {
            return invalid("epsilon must be positive for sinkhorn");
        }
        Ok(())
    }

    /// The concrete solver used for a pair of the given sizes.
    pub fn effective_mode(&self, n: usize, m: usize) -> SolverMode {
        match self.mode {
            SolverMode::Auto if n.saturating_mul(m) <= AUTO_EXACT_LIMIT => SolverMode::Exact,
            SolverMode::Auto => SolverMode::Sinkhorn,
            other => other,
        }
    }
}

/// Solve the transport problem between `mu` and `nu` under squared Euclidean
/// cost with whichever solver `config` selects for their sizes.
pub fn solve(mu: &DiscreteMeasure, nu: &DiscreteMeasure, config: &SolverConfig) -> Result<CouplingMatrix> {
    config.validate()?;
    let cost = squared_euclidean_cost(mu.points(), nu.points())?;
    match config.effective_mode(mu.len(), nu.len()) {
        SolverMode::Sinkhorn => sinkhorn(mu, nu, &cost, config).map(|(plan, _)| plan),
        _ => exact_ot(mu, nu, &cost),
    }
}

/// Barycentric projection `G · X_target`: row `l` is the coupling-weighted
/// image of source point `l`, scaled by its mass.
pub fn barycentric_projection(coupling: &CouplingMatrix, target_points: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if coupling.ncols() != target_points.nrows() {
        return invalid(format!(
            "coupling has {} columns but target has {} points",
            coupling.ncols(),
            target_points.nrows()
        ));
    }
    Ok(coupling.entries().dot(&target_points))
}

/// Total transport cost `⟨G, C⟩`.
pub fn transport_cost(coupling: &CouplingMatrix, cost: &CostMatrix) -> Result<f64> {
    if coupling.entries().dim() != cost.entries().dim() {
        return invalid(format!(
            "coupling is {:?} but cost is {:?}",
            coupling.entries().dim(),
            cost.entries().dim()
        ));
    }
    Ok(coupling
        .entries()
        .iter()
        .zip(cost.entries().iter())
        .map(|(g, c)| g * c)
        .sum())
}
