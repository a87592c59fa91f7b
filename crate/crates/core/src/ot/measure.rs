use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{invalid, Result};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A weighted point cloud: `n` points in `R^p` with nonnegative weights
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Array2<f64>,
    weights: Array1<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Array2<f64>, weights: Array1<f64>) -> Result<Self> {
        let n = points.nrows();
        if n == 0 {
            return invalid("a measure needs at least one point");
        }
        if weights.len() != n {
            return invalid(format!("{} points but {} weights", n, weights.len()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite coordinate in point cloud");
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return invalid("weights must be finite and nonnegative");
        }
        let total: f64 = weights.sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return invalid(format!("weights sum to {total}, expected 1"));
        }
        Ok(DiscreteMeasure { points, weights })
    }

    /// Uniform weights `1/n`.
    pub fn uniform(points: Array2<f64>) -> Result<Self> {
        let n = points.nrows();
        if n == 0 {
            return invalid("a measure needs at least one point");
        }
        let w = Array1::from_elem(n, 1.0 / n as f64);
        Self::new(points, w)
    }

    /// Weights rescaled to unit L1 norm before construction.
    pub fn normalized(points: Array2<f64>, weights: Array1<f64>) -> Result<Self> {
        let total: f64 = weights.iter().map(|w| w.abs()).sum();
        if !(total > 0.0) {
            return invalid("weights have zero total mass");
        }
        Self::new(points, weights / total)
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    pub fn weights(&self) -> ArrayView1<'_, f64> {
        self.weights.view()
    }

    /// True when all weights are equal.
    pub fn is_uniform(&self) -> bool {
        let w0 = self.weights[0];
        self.weights.iter().all(|&w| w == w0)
    }

    /// Weighted mean of the points.
    pub fn mean(&self) -> Array1<f64> {
        self.points.t().dot(&self.weights)
    }
}

/// A transport plan with its row and column marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: Array2<f64>,
    row_marginal: Array1<f64>,
    col_marginal: Array1<f64>,
}

impl CouplingMatrix {
    /// Wrap a nonnegative matrix; the marginals are taken from its sums.
    pub fn from_entries(entries: Array2<f64>) -> Result<Self> {
        if entries.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return invalid("coupling entries must be finite and nonnegative");
        }
        let row_marginal = entries.sum_axis(Axis(1));
        let col_marginal = entries.sum_axis(Axis(0));
        Ok(CouplingMatrix {
            entries,
            row_marginal,
            col_marginal,
        })
    }

    /// Wrap a plan computed for the given target marginals.
    pub(crate) fn with_marginals(entries: Array2<f64>, row_marginal: Array1<f64>, col_marginal: Array1<f64>) -> Self {
        CouplingMatrix {
            entries,
            row_marginal,
            col_marginal,
        }
    }

    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn into_entries(self) -> Array2<f64> {
        self.entries
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn row_marginal(&self) -> ArrayView1<'_, f64> {
        self.row_marginal.view()
    }

    pub fn col_marginal(&self) -> ArrayView1<'_, f64> {
        self.col_marginal.view()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.sum()
    }

    /// L1 distances between the plan's row/column sums and the target marginals.
    pub fn marginal_errors(&self) -> (f64, f64) {
        let rows = self.entries.sum_axis(Axis(1));
        let cols = self.entries.sum_axis(Axis(0));
        let row_err = rows
            .iter()
            .zip(self.row_marginal.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        let col_err = cols
            .iter()
            .zip(self.col_marginal.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        (row_err, col_err)
    }

    pub fn transpose(&self) -> CouplingMatrix {
        CouplingMatrix {
            entries: self.entries.t().to_owned(),
            row_marginal: self.col_marginal.clone(),
            col_marginal: self.row_marginal.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_bad_weights() {
        let pts = array![[0.0], [1.0]];
        assert!(DiscreteMeasure::new(pts.clone(), array![0.5, 0.6]).is_err());
        assert!(DiscreteMeasure::new(pts.clone(), array![1.5, -0.5]).is_err());
        assert!(DiscreteMeasure::new(pts.clone(), array![1.0]).is_err());
        assert!(DiscreteMeasure::new(array![[f64::NAN], [1.0]], array![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::uniform(Array2::zeros((0, 2))).is_err());
    }

    #[test]
    fn normalizes_weights() {
        let m = DiscreteMeasure::normalized(array![[0.0], [1.0]], array![1.0, 3.0]).unwrap();
        assert_eq!(m.weights().to_vec(), vec![0.25, 0.75]);
        assert!((m.mean()[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn coupling_marginals() {
        let g = CouplingMatrix::from_entries(array![[0.25, 0.25], [0.5, 0.0]]).unwrap();
        assert_eq!(g.row_marginal().to_vec(), vec![0.5, 0.5]);
        assert_eq!(g.col_marginal().to_vec(), vec![0.75, 0.25]);
        assert_eq!(g.marginal_errors(), (0.0, 0.0));
        assert!(CouplingMatrix::from_entries(array![[-0.1]]).is_err());
    }
}
