use thiserror::Error;

/// Errors produced by the fitting, transport and harness routines.
#[derive(Debug, Error)]
pub enum PotdError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("sinkhorn did not converge after {iterations} iterations (marginal error {marginal_error:e})")]
    Convergence { iterations: usize, marginal_error: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("dataset not found: {0}")]
    NotFound(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("label column not found: {0}")]
    MissingLabelColumn(String),

    #[error("dataset has a single class: {0}")]
    SingleClass(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl PotdError {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            PotdError::InvalidInput(_) => "invalid_input",
            PotdError::Degenerate(_) => "degenerate_input",
            PotdError::Convergence { .. } => "convergence",
            PotdError::Numeric(_) => "numeric",
            PotdError::NotFound(_) => "not_found",
            PotdError::Parse { .. } => "parse",
            PotdError::MissingLabelColumn(_) => "missing_label_column",
            PotdError::SingleClass(_) => "single_class",
            PotdError::Io(_) => "io",
            PotdError::Csv(_) => "csv",
            PotdError::Json(_) => "json",
        }
    }

    /// True for errors caused by the caller's input rather than by a numeric failure.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            PotdError::Convergence { .. } | PotdError::Numeric(_) | PotdError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, PotdError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(PotdError::InvalidInput(msg.into()))
}
