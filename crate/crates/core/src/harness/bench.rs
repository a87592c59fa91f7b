use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::{accuracy, knn_predict, DEFAULT_K};
use super::method::Method;
use super::report::{mean_sd, BenchmarkReport, CellFailure, MetricKind, ReportRow, SCHEMA_VERSION};
use super::split::{make_split, Split, SplitConfig};
use crate::dataset::LabeledDataset;
use crate::error::{invalid, PotdError, Result};
use crate::metrics::subspace_distance;
use crate::ot::SolverConfig;
use crate::potd::{project, Basis};
use crate::rng::derive_seed;
use crate::synthetic::{generate, Model, SyntheticSpec, DEFAULT_NOISE_SCALE};

/// Fitted dimension and accuracy of one cell, or why it failed.
type CellScore = Result<(usize, f64)>;

/// Default reduced dimensions for the real-data protocol.
pub const DEFAULT_DIMS: [usize; 5] = [2, 4, 6, 8, 10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticBenchConfig {
    pub models: Vec<Model>,
    pub p_values: Vec<usize>,
    pub methods: Vec<Method>,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub noise_scale: f64,
    pub solver: SolverConfig,
    /// Whiten before POTD (SIR and SAVE always whiten).
    pub whiten: bool,
}

impl Default for SyntheticBenchConfig {
    fn default() -> Self {
        SyntheticBenchConfig {
            models: Model::BENCHMARK.to_vec(),
            p_values: vec![10, 20, 30],
            methods: Method::ALL.to_vec(),
            n: 400,
            replications: 100,
            seed: 42,
            noise_scale: DEFAULT_NOISE_SCALE,
            solver: SolverConfig::default(),
            whiten: true,
        }
    }
}

/// Score each method's subspace estimate against the model's reference
/// subspace. Every method sees the same dataset in a given replication; a
/// failing fit is recorded and the run continues.
pub fn run_synthetic_benchmark(config: &SyntheticBenchConfig) -> Result<BenchmarkReport> {
    if config.replications == 0 {
        return invalid("replications must be at least 1");
    }
    if config.methods.is_empty() || config.models.is_empty() || config.p_values.is_empty() {
        return invalid("models, p_values and methods must be nonempty");
    }
    config.solver.validate()?;
    let mut settings = Vec::new();
    for &model in &config.models {
        for &p in &config.p_values {
            let mut spec = SyntheticSpec::new(model, config.n, p, config.seed);
            spec.noise_scale = config.noise_scale;
            spec.validate()?;
            settings.push(spec);
        }
    }
    let tasks: Vec<(usize, usize)> = (0..settings.len())
        .flat_map(|s| (0..config.replications).map(move |rep| (s, rep)))
        .collect();
    let outcomes: Vec<Vec<Result<(usize, f64)>>> = tasks
        .par_iter()
        .map(|&(s, rep)| {
            let base = settings[s];
            let [model_id, p] = base.stream_id();
            let spec = SyntheticSpec {
                seed: derive_seed(config.seed, &[model_id, p, rep as u64]),
                ..base
            };
            let (data, truth) = match generate(&spec) {
                Ok(v) => v,
                Err(e) => {
                    let msg = e.to_string();
                    return config
                        .methods
                        .iter()
                        .map(|_| Err(PotdError::InvalidInput(format!("data generation failed: {msg}"))))
                        .collect();
                }
            };
            let r0 = truth.dim();
            config
                .methods
                .iter()
                .map(|&m| {
                    let basis = m.fit(&data, r0, &config.solver, config.whiten)?;
                    Ok((basis.dim(), subspace_distance(&basis, &truth)?))
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (s, spec) in settings.iter().enumerate() {
        let setting = format!("{}-{}", spec.model, spec.p);
        let r0 = spec.model.true_dim();
        for (mi, method) in config.methods.iter().enumerate() {
            let mut values = Vec::new();
            let mut fitted_r = None;
            for rep in 0..config.replications {
                match &outcomes[s * config.replications + rep][mi] {
                    Ok((r, v)) => {
                        fitted_r.get_or_insert(*r);
                        values.push(*v);
                    }
                    Err(e) => failures.push(CellFailure::new(method.name(), &setting, r0, rep, e)),
                }
            }
            if values.is_empty() {
                continue;
            }
            let (mean, sd) = mean_sd(&values);
            rows.push(ReportRow {
                method: method.name().to_string(),
                setting: setting.clone(),
                requested_r: r0,
                r: fitted_r.unwrap_or(r0),
                mean_metric: mean,
                std_metric: sd,
                replications: config.replications,
                completed: values.len(),
                metric_kind: MetricKind::SubspaceDistance,
                values,
            });
        }
    }
    Ok(BenchmarkReport {
        schema_version: SCHEMA_VERSION,
        kind: "synthetic".into(),
        config: serde_json::to_value(config)?,
        rows,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealBenchConfig {
    /// Name used for the `setting` column.
    pub setting: String,
    pub methods: Vec<Method>,
    pub dims: Vec<usize>,
    pub split: SplitConfig,
    pub k: usize,
    pub solver: SolverConfig,
    pub whiten: bool,
}

impl Default for RealBenchConfig {
    fn default() -> Self {
        RealBenchConfig {
            setting: "dataset".into(),
            methods: Method::ALL.to_vec(),
            dims: DEFAULT_DIMS.to_vec(),
            split: SplitConfig::default(),
            k: DEFAULT_K,
            solver: SolverConfig::default(),
            whiten: true,
        }
    }
}

/// Outcome of one (method, dimension) cell within a replication.
#[derive(Debug)]
pub struct CellOutcome {
    pub method: Method,
    pub requested_r: usize,
    pub result: Result<(Basis, f64)>,
}

/// Fit every method on the training rows only, project both parts, and score
/// KNN test accuracy.
pub fn evaluate_replication(data: &LabeledDataset, split: &Split, config: &RealBenchConfig) -> Result<Vec<CellOutcome>> {
    let train = data.subset(&split.train)?;
    let test = data.subset(&split.test)?;
    let p = data.p();
    let names = data.class_names()?;
    let counts = train.class_counts()?;
    let absent: Vec<&str> = counts
        .iter()
        .zip(names)
        .filter(|(&c, _)| c == 0)
        .map(|(_, n)| n.as_str())
        .collect();
    let mut cells = Vec::new();
    for &method in &config.methods {
        if !absent.is_empty() {
            for &r in &config.dims {
                cells.push(CellOutcome {
                    method,
                    requested_r: r,
                    result: Err(PotdError::InvalidInput(format!(
                        "class {} absent from the training split",
                        absent.join(", ")
                    ))),
                });
            }
            continue;
        }
        let valid_dims: Vec<usize> = config.dims.iter().copied().filter(|&r| r >= 1 && r < p).collect();
        let fitted = method.fit_dims(&train, &valid_dims, &config.solver, config.whiten);
        let mut fitted_iter = match fitted {
            Ok(v) => v.into_iter().map(Some).collect::<Vec<_>>().into_iter(),
            Err(e) => {
                let msg = e.to_string();
                let kind = e.kind();
                valid_dims
                    .iter()
                    .map(|_| Some(Err(PotdError::InvalidInput(format!("{kind}: {msg}")))))
                    .collect::<Vec<_>>()
                    .into_iter()
            }
        };
        for &r in &config.dims {
            let result = if r == 0 || r >= p {
                Err(PotdError::InvalidInput(format!("reduced dimension {r} must be in 1..{p}")))
            } else {
                let basis = fitted_iter.next().flatten().expect("one fit per valid dimension");
                basis.and_then(|b| {
                    let acc = score(&train, test.x(), test.codes()?, &b, config.k)?;
                    Ok((b, acc))
                })
            };
            cells.push(CellOutcome {
                method,
                requested_r: r,
                result,
            });
        }
    }
    Ok(cells)
}

fn score(train: &LabeledDataset, test_x: ArrayView2<'_, f64>, test_codes: &[usize], basis: &Basis, k: usize) -> Result<f64> {
    let train_proj = train.with_features(project(train.x(), basis)?)?;
    let test_proj = project(test_x, basis)?;
    let pred = knn_predict(&train_proj, test_proj.view(), k)?;
    accuracy(&pred, test_codes)
}

/// KNN accuracy of each method and dimension over repeated random splits.
pub fn run_real_benchmark(data: &LabeledDataset, config: &RealBenchConfig) -> Result<BenchmarkReport> {
    config.split.validate()?;
    config.solver.validate()?;
    data.require_classes()?;
    if config.k == 0 {
        return invalid("K must be at least 1");
    }
    if config.methods.is_empty() || config.dims.is_empty() {
        return invalid("methods and dims must be nonempty");
    }
    let reps = config.split.replications;
    let per_rep: Vec<Result<Vec<CellOutcome>>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let split = make_split(data, &config.split, rep)?;
            evaluate_replication(data, &split, config)
        })
        .collect();

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut grid: Vec<Vec<Option<CellScore>>> = Vec::new();
    for outcome in per_rep {
        match outcome {
            Ok(cells) => grid.push(
                cells
                    .into_iter()
                    .map(|c| Some(c.result.map(|(b, acc)| (b.dim(), acc))))
                    .collect(),
            ),
            Err(e) => {
                let msg = e.to_string();
                grid.push(
                    (0..config.methods.len() * config.dims.len())
                        .map(|_| Some(Err(PotdError::InvalidInput(format!("split failed: {msg}")))))
                        .collect(),
                )
            }
        }
    }
    for (mi, method) in config.methods.iter().enumerate() {
        for (di, &r) in config.dims.iter().enumerate() {
            let idx = mi * config.dims.len() + di;
            let mut values = Vec::new();
            let mut fitted_r = None;
            for (rep, cells) in grid.iter_mut().enumerate() {
                match cells[idx].take().expect("each cell visited once") {
                    Ok((dim, acc)) => {
                        fitted_r.get_or_insert(dim);
                        values.push(acc);
                    }
                    Err(e) => failures.push(CellFailure::new(method.name(), &config.setting, r, rep, &e)),
                }
            }
            if values.is_empty() {
                continue;
            }
            let (mean, sd) = mean_sd(&values);
            rows.push(ReportRow {
                method: method.name().to_string(),
                setting: config.setting.clone(),
                requested_r: r,
                r: fitted_r.unwrap_or(r),
                mean_metric: mean,
                std_metric: sd,
                replications: reps,
                completed: values.len(),
                metric_kind: MetricKind::Accuracy,
                values,
            });
        }
    }
    Ok(BenchmarkReport {
        schema_version: SCHEMA_VERSION,
        kind: "real".into(),
        config: serde_json::to_value(config)?,
        rows,
        failures,
    })
}
