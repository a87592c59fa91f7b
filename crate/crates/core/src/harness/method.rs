use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{pca_fit, save_fit, sir_fit};
use crate::dataset::LabeledDataset;
use crate::error::{invalid, PotdError, Result};
use crate::ot::SolverConfig;
use crate::potd::{displacement_stack, Basis};

/// A dimension reduction method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "POTD")]
    Potd,
    #[serde(rename = "SIR")]
    Sir,
    #[serde(rename = "SAVE")]
    Save,
    #[serde(rename = "PCA")]
    Pca,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Potd, Method::Sir, Method::Save, Method::Pca];

    pub fn name(self) -> &'static str {
        match self {
            Method::Potd => "POTD",
            Method::Sir => "SIR",
            Method::Save => "SAVE",
            Method::Pca => "PCA",
        }
    }

    /// Fit one basis per requested dimension. POTD computes its couplings
    /// once and reads every dimension off the same displacement stack; a
    /// failure there is returned as the outer error.
    pub fn fit_dims(
        self,
        data: &LabeledDataset,
        dims: &[usize],
        solver: &SolverConfig,
        whiten: bool,
    ) -> Result<Vec<Result<Basis>>> {
        match self {
            Method::Potd => {
                let stack = displacement_stack(data, solver, whiten)?;
                Ok(dims
                    .iter()
                    .map(|&r| check_dim(r, data.p()).and_then(|_| stack.basis(r)))
                    .collect())
            }
            _ => Ok(dims.iter().map(|&r| self.fit(data, r, solver, whiten)).collect()),
        }
    }

    pub fn fit(self, data: &LabeledDataset, r: usize, solver: &SolverConfig, whiten: bool) -> Result<Basis> {
        match self {
            Method::Potd => crate::potd::potd_fit(data, r, solver, whiten),
            Method::Sir => sir_fit(data, r),
            Method::Save => save_fit(data, r),
            Method::Pca => pca_fit(&data.x().to_owned(), r),
        }
    }
}

fn check_dim(r: usize, p: usize) -> Result<()> {
    if r == 0 || r > p {
        return invalid(format!("structure dimension must be in 1..={p}, got {r}"));
    }
    Ok(())
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = PotdError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "POTD" => Ok(Method::Potd),
            "SIR" => Ok(Method::Sir),
            "SAVE" => Ok(Method::Save),
            "PCA" => Ok(Method::Pca),
            other => invalid(format!("unknown method '{other}' (valid: POTD, SIR, SAVE, PCA)")),
        }
    }
}
