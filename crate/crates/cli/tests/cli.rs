use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn potd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potd"))
        .current_dir(dir)
        .args(args)
        .env_remove("POTD_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_matrix(path: &PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn numbers(rows: &[Vec<String>], cols: usize) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r[..cols].iter().map(|v| v.parse().unwrap()).collect()).collect()
}

fn generate(dir: &Path, model: &str, n: &str, name: &str) {
    let out = potd(dir, &["generate", "--model", model, "-n", n, "--dump", name]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn help_lists_flags_and_defaults() {
    let dir = TempDir::new().unwrap();
    let out = potd(dir.path(), &["--help"]);
    assert_eq!(code(&out), 0);
    for cmd in ["fit", "embed", "bench-synthetic", "bench-real", "oracle-check", "generate"] {
        let out = potd(dir.path(), &[cmd, "--help"]);
        assert_eq!(code(&out), 0, "{cmd}");
        assert!(stdout(&out).contains("[default:"), "{cmd} help lacks defaults");
    }
    let text = stdout(&potd(dir.path(), &["bench-real", "--help"]));
    assert!(text.contains("[default: 10]"));
    assert!(text.contains("[default: 2,4,6,8,10]"));
    assert!(stdout(&potd(dir.path(), &["bench-synthetic", "--help"])).contains("[default: 42]"));
}

#[test]
fn fit_writes_orthonormal_basis_and_metadata() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), "I", "300", "m1.csv");
    let out = potd(dir.path(), &["fit", "m1.csv", "-r", "2", "--solver", "exact", "-o", "b.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_matrix(&dir.path().join("b.csv"));
    assert_eq!(header, ["b1", "b2"]);
    let b = numbers(&rows, 2);
    assert_eq!(b.len(), 10);
    for i in 0..2 {
        for j in 0..2 {
            let dot: f64 = b.iter().map(|row| row[i] * row[j]).sum();
            assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["r"], 2);
    assert_eq!(meta["config"]["solver"], "exact");
    assert_eq!(meta["config"]["whiten"], true);
    assert_eq!(meta["singular_values"].as_array().unwrap().len(), 10);
}

#[test]
fn auto_dim_recovers_two_translation_directions() {
    // three translated copies of one cloud: every transport map is a shift,
    // so the displacement stack has rank 2
    let dir = TempDir::new().unwrap();
    let base: Vec<[f64; 4]> = (0..12)
        .map(|i| {
            let t = i as f64;
            [(t * 0.7).sin(), (t * 1.3).cos(), (t * 0.4).sin() * 0.5, ((t * 2.1).cos() + t * 0.1) * 0.3]
        })
        .collect();
    let mut text = String::from("x1,x2,x3,x4,label\n");
    for (label, shift) in [("a", [0.0, 0.0]), ("b", [3.0, 0.0]), ("c", [0.0, 3.0])] {
        for p in &base {
            text.push_str(&format!("{},{},{},{},{label}\n", p[0] + shift[0], p[1] + shift[1], p[2], p[3]));
        }
    }
    fs::write(dir.path().join("shift.csv"), text).unwrap();
    let out = potd(
        dir.path(),
        &["fit", "shift.csv", "--auto-dim", "0.9", "--whiten", "false", "--solver", "exact", "-o", "b.csv"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["r"], 2);
    let sv: Vec<f64> = meta["singular_values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(sv[2] <= 1e-9 * sv[0]);
}

#[test]
fn missing_dataset_exits_two() {
    let dir = TempDir::new().unwrap();
    let out = potd(dir.path(), &["fit", "nope.csv", "-r", "2"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("dataset not found"));
    assert_eq!(err.trim().lines().count(), 1);
    assert!(err.starts_with("error kind=not_found"));
}

#[test]
fn fit_without_dimension_is_usage_error() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), "I", "100", "m1.csv");
    assert_eq!(code(&potd(dir.path(), &["fit", "m1.csv"])), 2);
}

#[test]
fn malformed_cell_reports_row_and_column() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.csv"), "x1,x2,label\n1,2,a\n3,NA,b\n").unwrap();
    let out = potd(dir.path(), &["fit", "bad.csv", "-r", "1"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("kind=parse") && err.contains("row 2") && err.contains("column 2"), "{err}");
}

#[test]
fn embed_pca_writes_coordinates_and_labels() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), "II", "120", "m2.csv");
    let out = potd(dir.path(), &["embed", "m2.csv", "--method", "PCA", "-r", "2", "-o", "e.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_matrix(&dir.path().join("e.csv"));
    assert_eq!(header, ["z1", "z2", "label"]);
    assert_eq!(rows.len(), 120);
    assert!(rows.iter().all(|r| r[2] == "1" || r[2] == "-1"));
}

#[test]
fn embed_rejects_dimension_above_p() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), "I", "100", "m1.csv");
    let out = potd(dir.path(), &["embed", "m1.csv", "-r", "11"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn potd_embedding_separates_cshape_classes() {
    let dir = TempDir::new().unwrap();
    // per-class standardization centers both classes, so the mean test uses pooled scaling
    let out = potd(
        dir.path(),
        &["generate", "--model", "cshape", "-n", "300", "--standardization", "pooled", "--dump", "c.csv"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = potd(dir.path(), &["embed", "c.csv", "--method", "POTD", "-r", "2", "--solver", "exact", "-o", "e.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (_, rows) = read_matrix(&dir.path().join("e.csv"));
    // Welch statistic on each coordinate; at least one must be far from zero
    let best_t = (0..2)
        .map(|j| {
            let split = |lab: &str| -> Vec<f64> { rows.iter().filter(|r| r[2] == lab).map(|r| r[j].parse().unwrap()).collect() };
            let (a, b) = (split("1"), split("2"));
            let mv = |v: &[f64]| {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64)
            };
            let ((ma, va), (mb, vb)) = (mv(&a), mv(&b));
            ((ma - mb) / (va / a.len() as f64 + vb / b.len() as f64).sqrt()).abs()
        })
        .fold(0.0, f64::max);
    assert!(best_t > 5.0, "t = {best_t}");
}

#[test]
fn bench_synthetic_writes_report_with_potd_row() {
    let dir = TempDir::new().unwrap();
    let out = potd(
        dir.path(),
        &["bench-synthetic", "--models", "I", "--p", "10", "-n", "120", "--reps", "3", "-o", "r.json", "--csv", "r.csv"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let rows = report["rows"].as_array().unwrap();
    let potd_row = rows.iter().find(|r| r["method"] == "POTD" && r["setting"] == "I-10").unwrap();
    assert_eq!(potd_row["values"].as_array().unwrap().len(), 3);
    assert_eq!(report["config"]["args"]["seed"], 42);
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("method,setting,r,mean,sd,reps\n"));
    assert!(csv.contains("POTD,I-10,2,"));
}

#[test]
fn unknown_method_lists_valid_ones() {
    let dir = TempDir::new().unwrap();
    let out = potd(dir.path(), &["bench-synthetic", "--methods", "POTD,LDA", "--reps", "1"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("POTD, SIR, SAVE, PCA"), "{err}");
}

#[test]
fn bench_real_defaults_and_missing_label() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), "I", "200", "m1.csv");
    let out = potd(dir.path(), &["bench-real", "m1.csv", "--reps", "2", "--methods", "PCA", "-o", "r.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["resolved"]["k"], 10);
    assert_eq!(report["config"]["resolved"]["dims"], serde_json::json!([2, 4, 6, 8, 10]));
    // r = 10 equals p and is recorded as a failed cell
    assert_eq!(report["rows"].as_array().unwrap().len(), 4);
    assert_eq!(report["failures"].as_array().unwrap().len(), 2);
    assert_eq!(report["rows"][0]["setting"], "m1");

    let out = potd(dir.path(), &["bench-real", "m1.csv", "--label", "class"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("kind=missing_label_column"));
}

#[test]
fn oracle_check_passes_and_gaps_shrink_with_epsilon() {
    let dir = TempDir::new().unwrap();
    let out = potd(dir.path(), &["oracle-check", "--size", "7"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("result: pass"));
    let gaps: Vec<f64> = text
        .lines()
        .filter_map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f.len() == 3).then(|| f[2].parse::<f64>().ok()).flatten()
        })
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
}

#[test]
fn oracle_check_rejects_large_size() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&potd(dir.path(), &["oracle-check", "--size", "20"])), 2);
}

#[test]
fn oracle_check_reports_failing_seed() {
    // a coarse regularization cannot meet the 1% gap
    let dir = TempDir::new().unwrap();
    let out = potd(dir.path(), &["oracle-check", "--size", "6", "--epsilons", "0.5", "--trials", "3"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("violation seed="));
    assert!(stderr(&out).contains("kind=oracle_violation"));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let args = ["bench-synthetic", "--models", "II", "--p", "6", "-n", "100", "--reps", "4", "--csv", "r.csv"];
    let run = |threads: Option<&str>, out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_potd"));
        cmd.current_dir(dir.path()).args(args).args(["-o", out]);
        match threads {
            Some(t) => cmd.env("POTD_THREADS", t),
            None => cmd.env_remove("POTD_THREADS"),
        };
        assert!(cmd.output().unwrap().status.success());
        fs::read(dir.path().join(out)).unwrap()
    };
    let a = run(None, "a.json");
    let b = run(None, "b.json");
    let c = run(Some("1"), "c.json");
    let strip = |bytes: Vec<u8>, name: &str| String::from_utf8(bytes).unwrap().replace(name, "OUT");
    assert_eq!(strip(a.clone(), "a.json"), strip(b, "b.json"));
    assert_eq!(strip(a, "a.json"), strip(c, "c.json"));
}

#[test]
fn invalid_thread_cap_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_potd"))
        .current_dir(dir.path())
        .args(["oracle-check"])
        .env("POTD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_overrides_flags() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.toml"), "[bench-synthetic]\nreps = 2\nmodels = [\"III\"]\np = [5]\nn = 100\n").unwrap();
    let out = potd(
        dir.path(),
        &["--config", "run.toml", "bench-synthetic", "--reps", "5", "--methods", "PCA", "-o", "r.json"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["args"]["reps"], 2);
    assert_eq!(report["rows"][0]["setting"], "III-5");
    assert_eq!(report["rows"][0]["replications"], 2);

    fs::write(dir.path().join("bad.toml"), "[bench-synthetic]\nrepz = 2\n").unwrap();
    let out = potd(dir.path(), &["--config", "bad.toml", "bench-synthetic"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown key 'repz'"));
}

#[test]
fn generate_dumps_dataset_and_reference_subspace() {
    let dir = TempDir::new().unwrap();
    let out = potd(dir.path(), &["generate", "--model", "svm3d", "-n", "50", "--dump", "s.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = read_matrix(&dir.path().join("s.csv"));
    assert_eq!(header, ["x1", "x2", "x3", "label"]);
    assert_eq!(rows.len(), 100);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["true_subspace"].as_array().unwrap().len(), 3);
    assert_eq!(meta["spec"]["p"], 3);

    let out = potd(dir.path(), &["generate", "--model", "III", "--p", "3", "--dump", "x.csv"]);
    assert_eq!(code(&out), 2);
}
