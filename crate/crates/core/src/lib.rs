//! Principal optimal transport directions (POTD) for sufficient dimension
//! reduction with categorical responses.
//!
//! For every ordered pair of classes an optimal coupling is computed, the
//! per-point displacement vectors are stacked, and the leading right
//! singular vectors of the stack estimate the reduction subspace. The crate
//! also carries SIR, SAVE and PCA baselines, the synthetic models used to
//! score them, and a KNN evaluation harness.

// guards like `!(x > 0.0)` are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod ot;
pub mod potd;
pub mod rng;
pub mod synthetic;
pub mod whitening;

pub use baselines::{pca_fit, save_fit, sir_fit};
pub use dataset::{LabeledDataset, Response};
pub use error::{PotdError, Result};
pub use metrics::{sin_distance, subspace_distance, TrueSubspace};
pub use ot::{SolverConfig, SolverMode};
pub use potd::{potd_fit, potd_fit_continuous, project, Basis};
