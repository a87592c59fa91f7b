//! Entropic optimal transport by log-domain Sinkhorn iteration.
//!
//! Dual potentials `f`, `g` are updated through log-sum-exp reductions, so the
//! scaling vectors `exp(f/ε)`, `exp(g/ε)` are never formed. Small targets are
//! reached by geometric ε-scaling with warm-started potentials; the converged
//! entropic plan is unique, so the schedule only affects speed.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{CostMatrix, CouplingMatrix, DiscreteMeasure, SolverConfig, SolverMode};
use crate::error::{invalid, PotdError, Result};

/// Diagnostics from a converged Sinkhorn run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinkhornReport {
    pub iterations: usize,
    /// Largest of the row and column marginal L1 errors.
    pub marginal_error: f64,
    pub epsilon: f64,
}

const SCALING_FACTOR: f64 = 4.0;
const WARM_STAGE_ITERATIONS: usize = 500;

pub fn sinkhorn(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostMatrix,
    config: &SolverConfig,
) -> Result<(CouplingMatrix, SinkhornReport)> {
    if config.mode == SolverMode::Exact {
        return invalid("sinkhorn called with an exact solver configuration");
    }
    config.validate()?;
    let (n, m) = cost.dim();
    if n != mu.len() || m != nu.len() {
        return invalid(format!(
            "cost is {}x{} but measures have {} and {} points",
            n,
            m,
            mu.len(),
            nu.len()
        ));
    }
    let target = config.epsilon.resolve(cost)?;
    let c = cost.entries();
    let log_a = mu.weights().mapv(f64::ln);
    let log_b = nu.weights().mapv(f64::ln);

    let max_cost = cost.max();
    let mut schedule = vec![target];
    while schedule.last().unwrap() * SCALING_FACTOR < 0.1 * max_cost {
        let next = schedule.last().unwrap() * SCALING_FACTOR;
        schedule.push(next);
    }
    schedule.reverse();

    let mut f = Array1::<f64>::zeros(n);
    let mut g = Array1::<f64>::zeros(m);
    let mut iterations = 0usize;
    let last_stage = schedule.len() - 1;
    for (stage, &eps) in schedule.iter().enumerate() {
        let final_stage = stage == last_stage;
        let stage_tol = if final_stage {
            config.marginal_tolerance
        } else {
            config.marginal_tolerance.max(1e-4)
        };
        let mut stage_iters = 0usize;
        loop {
            let lse_cols = lse_over_rows(c, &f, eps);
            let col_err: f64 = (0..m)
                .map(|j| {
                    let mass = if lse_cols[j] == f64::NEG_INFINITY {
                        0.0
                    } else {
                        ((g[j] / eps) + lse_cols[j]).exp()
                    };
                    (mass - nu.weights()[j]).abs()
                })
                .sum();
            if !col_err.is_finite() {
                return Err(numeric_failure(eps));
            }
            if iterations > 0 && col_err <= stage_tol {
                break;
            }
            if iterations >= config.max_iterations {
                return Err(PotdError::Convergence {
                    iterations,
                    marginal_error: col_err,
                });
            }
            if !final_stage && stage_iters >= WARM_STAGE_ITERATIONS {
                break;
            }
            for j in 0..m {
                g[j] = eps * (log_b[j] - lse_cols[j]);
            }
            let lse_rows = lse_over_cols(c, &g, eps);
            for i in 0..n {
                f[i] = eps * (log_a[i] - lse_rows[i]);
            }
            if f.iter().chain(g.iter()).any(|v| v.is_nan() || *v == f64::INFINITY) {
                return Err(numeric_failure(eps));
            }
            iterations += 1;
            stage_iters += 1;
        }
    }

    let plan = Array2::from_shape_fn((n, m), |(i, j)| {
        let e = (f[i] + g[j] - c[[i, j]]) / target;
        if e.is_finite() {
            e.exp()
        } else {
            0.0
        }
    });
    let coupling = CouplingMatrix::with_marginals(plan, mu.weights().to_owned(), nu.weights().to_owned());
    let (row_err, col_err) = coupling.marginal_errors();
    let marginal_error = row_err.max(col_err);
    if !marginal_error.is_finite() {
        return Err(numeric_failure(target));
    }
    if marginal_error > config.marginal_tolerance {
        return Err(PotdError::Convergence {
            iterations,
            marginal_error,
        });
    }
    Ok((
        coupling,
        SinkhornReport {
            iterations,
            marginal_error,
            epsilon: target,
        },
    ))
}

fn numeric_failure(eps: f64) -> PotdError {
    PotdError::Numeric(format!(
        "sinkhorn potentials became non-finite at epsilon {eps:e}; try a larger epsilon"
    ))
}

/// `lse_i((f_i - C_ij)/ε)` for every column `j`.
fn lse_over_rows(c: ArrayView2<'_, f64>, f: &Array1<f64>, eps: f64) -> Vec<f64> {
    let (n, m) = c.dim();
    (0..m)
        .map(|j| log_sum_exp((0..n).map(|i| (f[i] - c[[i, j]]) / eps)))
        .collect()
}

/// `lse_j((g_j - C_ij)/ε)` for every row `i`.
fn lse_over_cols(c: ArrayView2<'_, f64>, g: &Array1<f64>, eps: f64) -> Vec<f64> {
    let (n, m) = c.dim();
    (0..n)
        .map(|i| log_sum_exp((0..m).map(|j| (g[j] - c[[i, j]]) / eps)))
        .collect()
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}
