use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{invalid, PotdError, Result};
use crate::ot::DiscreteMeasure;

/// Response variable attached to a predictor matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    /// Class codes `0..k` into `names`.
    Classes { codes: Vec<usize>, names: Vec<String> },
    Continuous(Vec<f64>),
}

/// Predictors with a categorical or real-valued response and optional
/// per-class point weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    x: Array2<f64>,
    response: Response,
    class_weights: Option<Vec<Array1<f64>>>,
}

impl LabeledDataset {
    /// Build a categorical dataset from arbitrary label strings. Classes are
    /// ordered numerically when every label parses as a number, otherwise
    /// lexicographically.
    pub fn categorical<S: AsRef<str>>(x: Array2<f64>, labels: &[S]) -> Result<Self> {
        let mut names: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        names.sort();
        names.dedup();
        let numeric: Option<Vec<f64>> = names.iter().map(|s| s.trim().parse::<f64>().ok()).collect();
        if let Some(vals) = numeric {
            let mut paired: Vec<(f64, String)> = vals.into_iter().zip(names).collect();
            paired.sort_by(|a, b| a.0.total_cmp(&b.0));
            names = paired.into_iter().map(|(_, s)| s).collect();
        }
        let codes = labels
            .iter()
            .map(|s| names.iter().position(|n| n == s.as_ref()).unwrap())
            .collect();
        Self::from_codes(x, codes, names)
    }

    pub fn from_codes(x: Array2<f64>, codes: Vec<usize>, names: Vec<String>) -> Result<Self> {
        check_features(&x, codes.len())?;
        if let Some(&bad) = codes.iter().find(|&&c| c >= names.len()) {
            return invalid(format!("class code {bad} has no name ({} classes)", names.len()));
        }
        Ok(LabeledDataset {
            x,
            response: Response::Classes { codes, names },
            class_weights: None,
        })
    }

    pub fn continuous(x: Array2<f64>, y: Vec<f64>) -> Result<Self> {
        check_features(&x, y.len())?;
        if y.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite response value");
        }
        Ok(LabeledDataset {
            x,
            response: Response::Continuous(y),
            class_weights: None,
        })
    }

    /// Attach per-class point weights; each vector is rescaled to unit L1 norm.
    pub fn with_class_weights(mut self, weights: Vec<Vec<f64>>) -> Result<Self> {
        let k = self.num_classes()?;
        if weights.len() != k {
            return invalid(format!("{} weight vectors for {k} classes", weights.len()));
        }
        let counts = self.class_counts()?;
        let mut normalized = Vec::with_capacity(k);
        for (c, w) in weights.into_iter().enumerate() {
            if w.len() != counts[c] {
                return invalid(format!(
                    "class {c} has {} points but {} weights",
                    counts[c],
                    w.len()
                ));
            }
            if w.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return invalid(format!("class {c} has a negative or non-finite weight"));
            }
            let total: f64 = w.iter().sum();
            if !(total > 0.0) {
                return invalid(format!("class {c} weights have zero mass"));
            }
            normalized.push(Array1::from(w) / total);
        }
        self.class_weights = Some(normalized);
        Ok(self)
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn response(&self) -> &Response {
        &self.response
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.response, Response::Classes { .. })
    }

    pub fn codes(&self) -> Result<&[usize]> {
        match &self.response {
            Response::Classes { codes, .. } => Ok(codes),
            Response::Continuous(_) => invalid("categorical labels required, found a continuous response"),
        }
    }

    pub fn class_names(&self) -> Result<&[String]> {
        match &self.response {
            Response::Classes { names, .. } => Ok(names),
            Response::Continuous(_) => invalid("categorical labels required, found a continuous response"),
        }
    }

    pub fn continuous_response(&self) -> Result<&[f64]> {
        match &self.response {
            Response::Continuous(y) => Ok(y),
            Response::Classes { .. } => invalid("continuous response required, found class labels"),
        }
    }

    pub fn num_classes(&self) -> Result<usize> {
        self.class_names().map(|n| n.len())
    }

    pub fn class_counts(&self) -> Result<Vec<usize>> {
        let k = self.num_classes()?;
        let mut counts = vec![0; k];
        for &c in self.codes()? {
            counts[c] += 1;
        }
        Ok(counts)
    }

    /// Row indices of class `c`, in sample order.
    pub fn class_rows(&self, c: usize) -> Result<Vec<usize>> {
        Ok(self
            .codes()?
            .iter()
            .enumerate()
            .filter(|(_, &code)| code == c)
            .map(|(i, _)| i)
            .collect())
    }

    /// Fails unless there are at least two classes and none is empty.
    pub fn require_classes(&self) -> Result<usize> {
        let counts = self.class_counts()?;
        if counts.len() < 2 {
            return Err(PotdError::SingleClass(format!(
                "need at least two classes, found {}",
                counts.len()
            )));
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return invalid(format!("class '{}' has no samples", self.class_names()?[c]));
        }
        Ok(counts.len())
    }

    /// Weighted point cloud of class `c` drawn from `features` (same rows as
    /// the dataset), using attached weights or uniform ones.
    pub fn class_measure(&self, features: ArrayView2<'_, f64>, c: usize) -> Result<DiscreteMeasure> {
        let rows = self.class_rows(c)?;
        let points = features.select(Axis(0), &rows);
        match &self.class_weights {
            Some(w) => DiscreteMeasure::normalized(points, w[c].clone()),
            None => DiscreteMeasure::uniform(points),
        }
    }

    /// Same response and weights with a replacement feature matrix.
    pub fn with_features(&self, x: Array2<f64>) -> Result<Self> {
        check_features(&x, self.n())?;
        Ok(LabeledDataset {
            x,
            response: self.response.clone(),
            class_weights: self.class_weights.clone(),
        })
    }

    /// Rows `idx` of the dataset. Class names are kept even if a class ends up
    /// empty; class weights are dropped.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let x = self.x.select(Axis(0), idx);
        let response = match &self.response {
            Response::Classes { codes, names } => Response::Classes {
                codes: idx.iter().map(|&i| codes[i]).collect(),
                names: names.clone(),
            },
            Response::Continuous(y) => Response::Continuous(idx.iter().map(|&i| y[i]).collect()),
        };
        check_features(&x, idx.len())?;
        Ok(LabeledDataset {
            x,
            response,
            class_weights: None,
        })
    }
}

fn check_features(x: &Array2<f64>, n_labels: usize) -> Result<()> {
    if x.nrows() != n_labels {
        return invalid(format!("{} rows but {} responses", x.nrows(), n_labels));
    }
    if x.nrows() == 0 || x.ncols() == 0 {
        return invalid("empty predictor matrix");
    }
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("non-finite predictor value");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn numeric_labels_sort_numerically() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let d = LabeledDataset::categorical(x, &["10", "2", "-1", "2"]).unwrap();
        assert_eq!(d.class_names().unwrap(), &["-1", "2", "10"]);
        assert_eq!(d.codes().unwrap(), &[2, 1, 0, 1]);
        assert_eq!(d.class_counts().unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn class_weights_are_renormalized() {
        let x = array![[0.0], [1.0], [2.0]];
        let d = LabeledDataset::categorical(x, &["a", "a", "b"])
            .unwrap()
            .with_class_weights(vec![vec![1.0, 3.0], vec![2.0]])
            .unwrap();
        let m = d.class_measure(d.x(), 0).unwrap();
        assert_eq!(m.weights().to_vec(), vec![0.25, 0.75]);
        assert!(d.clone().with_class_weights(vec![vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn single_class_detected() {
        let d = LabeledDataset::categorical(array![[0.0], [1.0]], &["a", "a"]).unwrap();
        assert!(matches!(d.require_classes(), Err(PotdError::SingleClass(_))));
    }

    #[test]
    fn continuous_rejects_categorical_accessors() {
        let d = LabeledDataset::continuous(array![[0.0], [1.0]], vec![0.5, 1.5]).unwrap();
        assert!(d.codes().is_err());
        assert_eq!(d.continuous_response().unwrap(), &[0.5, 1.5]);
    }
}
