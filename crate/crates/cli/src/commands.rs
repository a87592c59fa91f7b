use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use potd::harness::{
    format_float, load_csv_dataset, run_real_benchmark, run_synthetic_benchmark, write_dataset, BenchmarkReport,
    LabelColumn, RealBenchConfig, SplitConfig, SyntheticBenchConfig, SCHEMA_VERSION,
};
use potd::potd::{displacement_stack, estimate_dimension};
use potd::synthetic::{generate as generate_dataset, Model, SyntheticSpec};
use potd::{project, Basis, LabeledDataset};
use serde::Serialize;
use serde_json::json;

use crate::args::{BenchRealArgs, BenchSyntheticArgs, EmbedArgs, FitArgs, GenerateArgs, InputArgs, OracleArgs};
use crate::error::CliError;
use crate::oracle;

fn load_input(input: &InputArgs) -> Result<LabeledDataset, CliError> {
    if !input.delimiter.is_ascii() {
        return Err(CliError::usage("invalid_input", "delimiter must be a single ASCII character"));
    }
    Ok(load_csv_dataset(&input.dataset, &LabelColumn::parse(&input.label), input.delimiter as u8)?)
}

/// `<path>.json`, next to the main output.
fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn write_rows(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let csv_err = |e: csv::Error| CliError::internal("csv", e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_basis(path: &Path, basis: &Basis) -> Result<(), CliError> {
    let header: Vec<String> = (1..=basis.dim()).map(|j| format!("b{j}")).collect();
    let v = basis.vectors();
    write_rows(path, &header, v.rows().into_iter().map(|row| row.iter().map(|&x| format_float(x)).collect()))
}

fn class_summary(data: &LabeledDataset) -> Result<serde_json::Value, CliError> {
    let names = data.class_names()?;
    let counts = data.class_counts()?;
    Ok(names.iter().zip(counts).map(|(n, c)| json!({"label": n, "count": c})).collect())
}

fn meta<T: Serialize>(command: &str, args: &T) -> Result<serde_json::Map<String, serde_json::Value>, CliError> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(args)?);
    Ok(m)
}

pub fn fit(args: &FitArgs) -> Result<(), CliError> {
    if args.r.is_none() && args.auto_dim.is_none() {
        return Err(CliError::usage("invalid_input", "either -r or --auto-dim is required"));
    }
    let data = load_input(&args.input)?;
    let solver = args.solver.to_config();
    solver.validate()?;
    let stack = displacement_stack(&data, &solver, args.whiten)?;
    let spectrum = stack.basis(1)?.singular_values().to_vec();
    let r = match (args.r, args.auto_dim) {
        (Some(r), _) => {
            if r == 0 || r > data.p() {
                return Err(CliError::usage("invalid_input", format!("r must be in 1..={}, got {r}", data.p())));
            }
            r
        }
        (None, Some(threshold)) => estimate_dimension(&spectrum, threshold)?,
        (None, None) => unreachable!(),
    };
    let basis = stack.basis(r)?;
    write_basis(&args.output, &basis)?;
    let mut m = meta("fit", args)?;
    m.insert("rows".into(), json!(data.n()));
    m.insert("features".into(), json!(data.p()));
    m.insert("classes".into(), class_summary(&data)?);
    m.insert("requested_r".into(), json!(args.r));
    m.insert("r".into(), json!(basis.dim()));
    m.insert("whitening_applied".into(), json!(basis.whitening_applied()));
    m.insert("singular_values".into(), json!(spectrum));
    write_json(&sidecar(&args.output), &serde_json::Value::Object(m))?;
    println!("fit: r={} basis={}", basis.dim(), args.output.display());
    Ok(())
}

pub fn embed(args: &EmbedArgs) -> Result<(), CliError> {
    let data = load_input(&args.input)?;
    if args.r == 0 || args.r > data.p() {
        return Err(CliError::usage(
            "invalid_input",
            format!("r must be in 1..={} for {} features, got {}", data.p(), data.p(), args.r),
        ));
    }
    let solver = args.solver.to_config();
    solver.validate()?;
    let basis = args.method.fit(&data, args.r, &solver, args.whiten)?;
    let z = project(data.x(), &basis)?;
    let names = data.class_names()?;
    let codes = data.codes()?;
    let mut header: Vec<String> = (1..=basis.dim()).map(|j| format!("z{j}")).collect();
    header.push("label".into());
    write_rows(
        &args.output,
        &header,
        z.rows().into_iter().zip(codes).map(|(row, &c)| {
            let mut rec: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            rec.push(names[c].clone());
            rec
        }),
    )?;
    let mut m = meta("embed", args)?;
    m.insert("rows".into(), json!(data.n()));
    m.insert("features".into(), json!(data.p()));
    m.insert("classes".into(), class_summary(&data)?);
    m.insert("r".into(), json!(basis.dim()));
    m.insert("basis".into(), json!(basis.vectors().rows().into_iter().map(|r| r.to_vec()).collect::<Vec<_>>()));
    write_json(&sidecar(&args.output), &serde_json::Value::Object(m))?;
    println!("embed: method={} r={} output={}", args.method, basis.dim(), args.output.display());
    Ok(())
}

fn finish_report<T: Serialize>(
    command: &str,
    args: &T,
    mut report: BenchmarkReport,
    output: &Path,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    report.config = json!({"command": command, "args": serde_json::to_value(args)?, "resolved": report.config});
    report.write_json(output)?;
    if let Some(path) = csv {
        report.write_csv(path)?;
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "{:<6} {:<12} {:>3} {:>10} {:>10} {:>9}", "method", "setting", "r", "mean", "sd", "completed")?;
    for row in &report.rows {
        writeln!(
            out,
            "{:<6} {:<12} {:>3} {:>10.4} {:>10.4} {:>4}/{:<4}",
            row.method, row.setting, row.requested_r, row.mean_metric, row.std_metric, row.completed, row.replications
        )?;
    }
    if !report.failures.is_empty() {
        writeln!(out, "{} failed cells (see report)", report.failures.len())?;
    }
    Ok(())
}

pub fn bench_synthetic(args: &BenchSyntheticArgs) -> Result<(), CliError> {
    let config = SyntheticBenchConfig {
        models: args.models.clone(),
        p_values: args.p.clone(),
        methods: args.methods.clone(),
        n: args.n,
        replications: args.reps,
        seed: args.seed,
        noise_scale: args.noise,
        solver: args.solver.to_config(),
        whiten: args.whiten,
    };
    let report = run_synthetic_benchmark(&config)?;
    finish_report("bench-synthetic", args, report, &args.report.output, args.report.csv.as_deref())
}

pub fn bench_real(args: &BenchRealArgs) -> Result<(), CliError> {
    let data = load_input(&args.input)?;
    let setting = args.setting.clone().unwrap_or_else(|| {
        args.input
            .dataset
            .file_stem()
            .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
    });
    let config = RealBenchConfig {
        setting,
        methods: args.methods.clone(),
        dims: args.dims.clone(),
        split: SplitConfig {
            test_fraction: args.test_fraction,
            replications: args.reps,
            seed: args.seed,
            stratified: args.stratified,
        },
        k: args.k,
        solver: args.solver.to_config(),
        whiten: args.whiten,
    };
    let report = run_real_benchmark(&data, &config)?;
    finish_report("bench-real", args, report, &args.report.output, args.report.csv.as_deref())
}

pub fn oracle_check(args: &OracleArgs) -> Result<(), CliError> {
    oracle::validate(args)?;
    println!("oracle-check config {}", serde_json::to_string(args)?);
    let summary = oracle::run(args)?;
    println!(
        "exact vs enumeration (n={}): max cost gap {:.3e}",
        summary.enumeration_size, summary.max_exact_gap
    );
    println!("{:>10} {:>14} {:>14}", "epsilon", "max_rel_gap", "mean_rel_gap");
    for row in &summary.rows {
        println!("{:>10.1e} {:>14.4e} {:>14.4e}", row.epsilon, row.max_rel_gap, row.mean_rel_gap);
    }
    if summary.violations.is_empty() {
        println!("result: pass");
        Ok(())
    } else {
        for v in &summary.violations {
            println!("violation {v}");
        }
        println!("result: fail");
        Err(CliError::internal("oracle_violation", summary.violations[0].clone()))
    }
}

pub fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let p = args.p.unwrap_or(if args.model == Model::Svm3d { 3 } else { 10 });
    let spec = SyntheticSpec {
        noise_scale: args.noise,
        standardization: args.standardization.into(),
        ..SyntheticSpec::new(args.model, args.n, p, args.seed)
    };
    let (data, truth) = generate_dataset(&spec)?;
    write_dataset(&args.dump, &data)?;
    let mut m = meta("generate", args)?;
    m.insert("spec".into(), serde_json::to_value(spec)?);
    m.insert("rows".into(), json!(data.n()));
    m.insert("classes".into(), class_summary(&data)?);
    m.insert(
        "true_subspace".into(),
        json!(truth.basis().rows().into_iter().map(|r| r.to_vec()).collect::<Vec<_>>()),
    );
    write_json(&sidecar(&args.dump), &serde_json::Value::Object(m))?;
    println!("generate: model={} rows={} p={} output={}", args.model, data.n(), p, args.dump.display());
    Ok(())
}
