use std::path::Path;

use ndarray::Array2;

use crate::dataset::LabeledDataset;
use crate::error::{invalid, PotdError, Result};

/// Which column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    /// Zero-based column index.
    Index(usize),
}

impl LabelColumn {
    /// A bare integer selects by index, anything else by header name.
    pub fn parse(s: &str) -> Self {
        match s.trim().parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }
}

/// Shape summary reported after ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSummary {
    pub rows: usize,
    pub features: usize,
    pub class_counts: Vec<(String, usize)>,
}

/// Read a headered CSV whose label column is categorical and all other
/// columns numeric. Reported row numbers count data rows from 1; column
/// numbers count from 1 including the label column.
pub fn load_csv_dataset(path: impl AsRef<Path>, label: &LabelColumn, delimiter: u8) -> Result<LabeledDataset> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(PotdError::NotFound(path.display().to_string()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let label_idx = match label {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PotdError::MissingLabelColumn(name.clone()))?,
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => {
            return Err(PotdError::MissingLabelColumn(format!(
                "index {i} (file has {} columns)",
                headers.len()
            )))
        }
    };
    let width = headers.len();
    if width < 2 {
        return invalid("dataset needs a label column and at least one feature");
    }
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != width {
            return Err(PotdError::Parse {
                row,
                column: record.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            if c == label_idx {
                labels.push(cell.to_string());
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(PotdError::Parse {
                        row,
                        column: c + 1,
                        message: format!("non-numeric value '{cell}'"),
                    })
                }
            }
        }
    }
    if labels.is_empty() {
        return invalid("dataset has no rows");
    }
    let x = Array2::from_shape_vec((labels.len(), width - 1), values)
        .map_err(|e| PotdError::InvalidInput(e.to_string()))?;
    let data = LabeledDataset::categorical(x, &labels)?;
    if data.num_classes()? < 2 {
        return Err(PotdError::SingleClass(path.display().to_string()));
    }
    Ok(data)
}

pub fn summarize(data: &LabeledDataset) -> Result<DatasetSummary> {
    let names = data.class_names()?;
    let counts = data.class_counts()?;
    Ok(DatasetSummary {
        rows: data.n(),
        features: data.p(),
        class_counts: names.iter().cloned().zip(counts).collect(),
    })
}

/// Write a dataset in the ingestion schema: `x1..xp` then `label`.
pub fn write_dataset(path: impl AsRef<Path>, data: &LabeledDataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    let labels: Vec<String> = match data.response() {
        crate::dataset::Response::Classes { codes, names } => codes.iter().map(|&c| names[c].clone()).collect(),
        crate::dataset::Response::Continuous(y) => y.iter().map(|v| format_float(*v)).collect(),
    };
    for (i, row) in data.x().rows().into_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
        rec.push(labels[i].clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that parses back to the same value.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}
