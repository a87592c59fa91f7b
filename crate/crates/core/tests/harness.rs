mod common;

use common::bundled_csv;
use potd::harness::{
    load_csv_dataset, make_split, run_real_benchmark, run_synthetic_benchmark, write_dataset, BenchmarkReport,
    LabelColumn, Method, MetricKind, RealBenchConfig, SplitConfig, SyntheticBenchConfig,
};
use potd::synthetic::Model;
use potd::{PotdError, SolverConfig};

fn blobs() -> potd::LabeledDataset {
    load_csv_dataset(bundled_csv("two_blobs.csv"), &LabelColumn::Name("label".into()), b',').unwrap()
}

#[test]
fn bundled_csv_loads_with_expected_shape() {
    let data = blobs();
    assert_eq!((data.n(), data.p()), (400, 10));
    assert_eq!(data.class_names().unwrap(), ["a", "b"]);
    assert_eq!(data.class_counts().unwrap(), vec![200, 200]);
}

#[test]
fn dataset_round_trips_through_csv() {
    let data = blobs();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("copy.csv");
    write_dataset(&path, &data).unwrap();
    let back = load_csv_dataset(&path, &LabelColumn::Index(10), b',').unwrap();
    assert_eq!(back.x(), data.x());
    assert_eq!(back.codes().unwrap(), data.codes().unwrap());
}

#[test]
fn missing_file_and_label_column_are_usage_errors() {
    let err = load_csv_dataset("/no/such/file.csv", &LabelColumn::Name("label".into()), b',').unwrap_err();
    assert!(matches!(err, PotdError::NotFound(_)) && err.is_usage());
    let err = load_csv_dataset(bundled_csv("two_blobs.csv"), &LabelColumn::Name("class".into()), b',').unwrap_err();
    assert!(matches!(err, PotdError::MissingLabelColumn(_)));
}

#[test]
fn stratified_splits_are_disjoint_and_cover_rows() {
    let data = blobs();
    let config = SplitConfig::default();
    for rep in 0..5 {
        let s = make_split(&data, &config, rep).unwrap();
        assert_eq!(s.train.len() + s.test.len(), data.n());
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), data.n());
        let test_a = s.test.iter().filter(|&&i| data.codes().unwrap()[i] == 0).count();
        assert_eq!(test_a, 100);
    }
}

#[test]
fn separable_blobs_are_classified_by_every_method() {
    let data = blobs();
    let config = RealBenchConfig {
        setting: "blobs".into(),
        dims: vec![2],
        split: SplitConfig {
            replications: 5,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = run_real_benchmark(&data, &config).unwrap();
    assert!(report.failures.is_empty());
    for m in Method::ALL {
        let row = report.find(m.name(), "blobs", 2).unwrap();
        assert_eq!(row.metric_kind, MetricKind::Accuracy);
        assert_eq!(row.values.len(), 5);
        if m != Method::Pca {
            assert!(row.mean_metric >= 0.9, "{} {}", m.name(), row.mean_metric);
        }
    }
}

#[test]
fn oversized_dimension_recorded_as_failure_and_run_continues() {
    let data = blobs();
    let config = RealBenchConfig {
        setting: "blobs".into(),
        methods: vec![Method::Pca],
        dims: vec![2, 10],
        split: SplitConfig {
            replications: 2,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = run_real_benchmark(&data, &config).unwrap();
    assert!(report.find("PCA", "blobs", 2).is_some());
    assert!(report.find("PCA", "blobs", 10).is_none());
    assert_eq!(report.failures.len(), 2);
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let config = SyntheticBenchConfig {
        models: vec![Model::I, Model::III],
        p_values: vec![6],
        n: 120,
        replications: 3,
        solver: SolverConfig::exact(),
        ..Default::default()
    };
    let a = run_synthetic_benchmark(&config).unwrap();
    let b = run_synthetic_benchmark(&config).unwrap();
    assert_eq!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
    assert_eq!(a.rows.len(), 2 * Method::ALL.len());

    let dir = tempfile::tempdir().unwrap();
    a.write_json(dir.path().join("r.json")).unwrap();
    assert_eq!(BenchmarkReport::read_json(dir.path().join("r.json")).unwrap(), a);
    a.write_csv(dir.path().join("r.csv")).unwrap();
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,setting,r,mean,sd,reps"));
    assert_eq!(lines.count(), a.rows.len());
}

#[test]
fn synthetic_distances_within_metric_range() {
    let config = SyntheticBenchConfig {
        p_values: vec![8],
        n: 100,
        replications: 2,
        ..Default::default()
    };
    let report = run_synthetic_benchmark(&config).unwrap();
    for row in &report.rows {
        let bound = (row.requested_r as f64).sqrt() + 1e-12;
        assert!(row.values.iter().all(|&v| (0.0..=bound).contains(&v)));
    }
}
