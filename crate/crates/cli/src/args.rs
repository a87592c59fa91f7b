use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use potd::harness::{Method, DEFAULT_K};
use potd::ot::{Epsilon, SolverConfig, SolverMode};
use potd::synthetic::{Model, Standardization, DEFAULT_NOISE_SCALE};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 42;

/// Principal optimal transport directions for dimension reduction with a
/// categorical response.
#[derive(Debug, Parser)]
#[command(name = "potd", version, about)]
pub struct Cli {
    /// TOML file whose `[<command>]` section overrides command-line flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Log verbosity.
    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Warn)]
    pub log_level: LogLevel,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
    Trace,
}

impl LogLevel {
    pub fn filter(self) -> log::LevelFilter {
        match self {
            LogLevel::Error => log::LevelFilter::Error,
            LogLevel::Warn => log::LevelFilter::Warn,
            LogLevel::Info => log::LevelFilter::Info,
            LogLevel::Debug => log::LevelFilter::Debug,
            LogLevel::Trace => log::LevelFilter::Trace,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a POTD basis from a labeled CSV.
    Fit(FitArgs),
    /// Project a labeled CSV onto a fitted subspace and write plot-ready coordinates.
    Embed(EmbedArgs),
    /// Subspace-distance benchmark on the synthetic models.
    BenchSynthetic(BenchSyntheticArgs),
    /// KNN-accuracy benchmark on a user-supplied CSV over repeated random splits.
    BenchReal(BenchRealArgs),
    /// Check the transport solvers against brute-force and exact references.
    OracleCheck(OracleArgs),
    /// Write a synthetic dataset to CSV.
    Generate(GenerateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Embed(_) => "embed",
            Command::BenchSynthetic(_) => "bench-synthetic",
            Command::BenchReal(_) => "bench-real",
            Command::OracleCheck(_) => "oracle-check",
            Command::Generate(_) => "generate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Exact,
    Sinkhorn,
    /// Exact for small class pairs, Sinkhorn for large ones.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonRule {
    /// Multiple of the median cost.
    Median,
    /// Multiple of the largest cost.
    Max,
    /// Fixed value in cost units.
    Absolute,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    /// Transport solver.
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    pub solver: SolverChoice,
    /// Entropic regularization, interpreted by --epsilon-rule.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = EpsilonRule::Median)]
    pub epsilon_rule: EpsilonRule,
    /// Sinkhorn iteration budget.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Sinkhorn marginal L1 tolerance.
    #[arg(long, default_value = "1e-9")]
    pub tol: f64,
}

impl SolverArgs {
    pub fn to_config(&self) -> SolverConfig {
        SolverConfig {
            mode: match self.solver {
                SolverChoice::Exact => SolverMode::Exact,
                SolverChoice::Sinkhorn => SolverMode::Sinkhorn,
                SolverChoice::Auto => SolverMode::Auto,
            },
            epsilon: match self.epsilon_rule {
                EpsilonRule::Median => Epsilon::MedianScaled(self.epsilon),
                EpsilonRule::Max => Epsilon::MaxScaled(self.epsilon),
                EpsilonRule::Absolute => Epsilon::Absolute(self.epsilon),
            },
            max_iterations: self.max_iter,
            marginal_tolerance: self.tol,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Input CSV with a header row.
    pub dataset: PathBuf,
    /// Label column, by header name or zero-based index.
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Number of directions to keep.
    #[arg(short, long, conflicts_with = "auto_dim")]
    pub r: Option<usize>,
    /// Choose r as the smallest count whose singular values reach this share of the total.
    #[arg(long, value_name = "THRESHOLD")]
    pub auto_dim: Option<f64>,
    /// Whiten predictors before fitting.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub whiten: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Basis CSV (p rows, r columns); metadata goes to `<output>.json`.
    #[arg(short, long, default_value = "basis.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EmbedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// POTD, SIR, SAVE or PCA.
    #[arg(long, default_value_t = Method::Potd)]
    pub method: Method,
    /// Embedding dimension.
    #[arg(short, long, default_value_t = 2)]
    pub r: usize,
    /// Whiten predictors before a POTD fit.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub whiten: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Embedding CSV (r coordinate columns plus label); metadata goes to `<output>.json`.
    #[arg(short, long, default_value = "embedding.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    /// JSON report with per-replication values.
    #[arg(short, long, default_value = "report.json")]
    pub output: PathBuf,
    /// Optional aggregate CSV (method, setting, r, mean, sd, reps).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchSyntheticArgs {
    /// Models to run.
    #[arg(long, value_delimiter = ',', default_value = "I,II,III,IV")]
    pub models: Vec<Model>,
    /// Ambient dimensions.
    #[arg(short, long = "p", value_delimiter = ',', default_value = "10,20,30")]
    pub p: Vec<usize>,
    /// Methods to compare.
    #[arg(long, value_delimiter = ',', default_value = "POTD,SIR,SAVE,PCA")]
    pub methods: Vec<Method>,
    /// Sample size per replication.
    #[arg(short, long, default_value_t = 400)]
    pub n: usize,
    /// Replications per setting.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Response noise scale.
    #[arg(long, default_value_t = DEFAULT_NOISE_SCALE)]
    pub noise: f64,
    /// Whiten predictors before POTD fits.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub whiten: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchRealArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Methods to compare.
    #[arg(long, value_delimiter = ',', default_value = "POTD,SIR,SAVE,PCA")]
    pub methods: Vec<Method>,
    /// Reduced dimensions.
    #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10")]
    pub dims: Vec<usize>,
    /// Neighbours in the KNN classifier.
    #[arg(short, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Random splits.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Share of rows held out for testing.
    #[arg(long, default_value_t = 0.5)]
    pub test_fraction: f64,
    /// Keep class proportions in each split.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub stratified: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Whiten predictors before POTD fits.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub whiten: bool,
    /// Setting name in the report; defaults to the file stem.
    #[arg(long)]
    pub setting: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

pub const MAX_ORACLE_SIZE: usize = 16;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    /// Points per measure (at most 16).
    #[arg(long, default_value_t = 7)]
    pub size: usize,
    /// Sinkhorn regularizations as multiples of the largest cost.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    pub epsilons: Vec<f64>,
    /// Random instances.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sinkhorn marginal L1 tolerance.
    #[arg(long, default_value = "1e-6")]
    pub tol: f64,
    /// Sinkhorn iteration budget.
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StandardizationArg {
    PerClass,
    Pooled,
}

impl From<StandardizationArg> for Standardization {
    fn from(s: StandardizationArg) -> Self {
        match s {
            StandardizationArg::PerClass => Standardization::PerClass,
            StandardizationArg::Pooled => Standardization::Pooled,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// I, II, III, IV, cshape or svm3d.
    #[arg(long, default_value_t = Model::I)]
    pub model: Model,
    /// Sample size (per class for cshape and svm3d).
    #[arg(short, long, default_value_t = 400)]
    pub n: usize,
    /// Ambient dimension [default: 10, or 3 for svm3d].
    #[arg(short, long = "p")]
    pub p: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Response noise scale for models I-IV.
    #[arg(long, default_value_t = DEFAULT_NOISE_SCALE)]
    pub noise: f64,
    /// Standardization for cshape.
    #[arg(long, value_enum, default_value_t = StandardizationArg::PerClass)]
    pub standardization: StandardizationArg,
    /// Output CSV; the reference subspace goes to `<dump>.json`.
    #[arg(long, value_name = "PATH")]
    pub dump: PathBuf,
}
