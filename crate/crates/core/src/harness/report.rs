use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PotdError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    SubspaceDistance,
    Accuracy,
}

/// Aggregate of one (method, setting, dimension) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub setting: String,
    pub requested_r: usize,
    /// Dimension actually fitted (SIR is capped at `k - 1`).
    pub r: usize,
    pub mean_metric: f64,
    /// Sample standard deviation (divisor `m - 1`; zero for a single value).
    pub std_metric: f64,
    pub replications: usize,
    /// Replications that produced a value.
    pub completed: usize,
    pub metric_kind: MetricKind,
    /// Per-replication values, in replication order.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub method: String,
    pub setting: String,
    pub requested_r: usize,
    pub replication: usize,
    pub error_kind: String,
    pub message: String,
}

impl CellFailure {
    pub fn new(method: &str, setting: &str, requested_r: usize, replication: usize, err: &PotdError) -> Self {
        CellFailure {
            method: method.to_string(),
            setting: setting.to_string(),
            requested_r,
            replication,
            error_kind: err.kind().to_string(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema_version: u32,
    pub kind: String,
    /// Fully resolved configuration of the run.
    pub config: serde_json::Value,
    pub rows: Vec<ReportRow>,
    pub failures: Vec<CellFailure>,
}

impl BenchmarkReport {
    pub fn find(&self, method: &str, setting: &str, requested_r: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.setting == setting && r.requested_r == requested_r)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()? + "\n")?;
        Ok(())
    }

    /// Aggregate rows only: `method,setting,r,mean,sd,reps`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["method", "setting", "r", "mean", "sd", "reps"])?;
        for row in &self.rows {
            w.write_record([
                row.method.clone(),
                row.setting.clone(),
                row.r.to_string(),
                format!("{:.6}", row.mean_metric),
                format!("{:.6}", row.std_metric),
                row.completed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Mean and sample standard deviation; `NaN` mean for an empty slice.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (m - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_sd_small_cases() {
        assert_eq!(mean_sd(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert!(mean_sd(&[]).0.is_nan());
    }
}
