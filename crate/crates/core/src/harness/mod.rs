//! Dataset ingestion, KNN evaluation and benchmark orchestration.

mod bench;
mod csv_io;
mod knn;
mod method;
mod report;
mod split;

pub use bench::{
    evaluate_replication, run_real_benchmark, run_synthetic_benchmark, CellOutcome, RealBenchConfig,
    SyntheticBenchConfig, DEFAULT_DIMS,
};
pub use csv_io::{format_float, load_csv_dataset, summarize, write_dataset, DatasetSummary, LabelColumn};
pub use knn::{accuracy, error_rate, knn_predict, DEFAULT_K};
pub use method::Method;
pub use report::{mean_sd, BenchmarkReport, CellFailure, MetricKind, ReportRow, SCHEMA_VERSION};
pub use split::{make_split, Split, SplitConfig};
