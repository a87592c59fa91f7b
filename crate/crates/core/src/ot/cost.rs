use ndarray::{Array2, ArrayView2};

use crate::error::{invalid, Result};

/// Pairwise squared Euclidean distances between a source and a target cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: Array2<f64>,
}

impl CostMatrix {
    pub fn from_entries(entries: Array2<f64>) -> Result<Self> {
        if entries.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
            return invalid("cost entries must be finite and nonnegative");
        }
        Ok(CostMatrix { entries })
    }

    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.entries.dim()
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Median entry (mean of the two middle entries for even counts).
    pub fn median(&self) -> f64 {
        let mut v: Vec<f64> = self.entries.iter().copied().collect();
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(|a, b| a.total_cmp(b));
        let mid = v.len() / 2;
        if v.len() % 2 == 1 {
            v[mid]
        } else {
            0.5 * (v[mid - 1] + v[mid])
        }
    }
}

pub fn squared_euclidean_cost(source: ArrayView2<'_, f64>, target: ArrayView2<'_, f64>) -> Result<CostMatrix> {
    if source.ncols() != target.ncols() {
        return invalid(format!(
            "source has {} columns, target has {}",
            source.ncols(),
            target.ncols()
        ));
    }
    if source.iter().chain(target.iter()).any(|v| !v.is_finite()) {
        return invalid("non-finite coordinate in cost input");
    }
    let (n, m) = (source.nrows(), target.nrows());
    // direct differences rather than the |x|^2 + |y|^2 - 2xy expansion, which
    // loses the exact zero on coincident points
    let entries = Array2::from_shape_fn((n, m), |(l, t)| {
        source
            .row(l)
            .iter()
            .zip(target.row(t).iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    });
    Ok(CostMatrix { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn self_distance_zero() {
        let c = squared_euclidean_cost(array![[1.0, 2.0]].view(), array![[1.0, 2.0]].view()).unwrap();
        assert_eq!(c.entries(), array![[0.0]]);
    }

    #[test]
    fn three_four_five() {
        let c = squared_euclidean_cost(array![[0.0, 0.0]].view(), array![[3.0, 4.0]].view()).unwrap();
        assert_eq!(c.entries(), array![[25.0]]);
    }

    #[test]
    fn two_sources_one_target() {
        let c = squared_euclidean_cost(array![[0.0, 0.0], [1.0, 0.0]].view(), array![[0.0, 1.0]].view()).unwrap();
        assert_eq!(c.entries(), array![[1.0], [2.0]]);
    }

    #[test]
    fn errors() {
        assert!(squared_euclidean_cost(array![[0.0, 0.0]].view(), array![[0.0]].view()).is_err());
        assert!(squared_euclidean_cost(array![[f64::INFINITY]].view(), array![[0.0]].view()).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        let c = CostMatrix::from_entries(array![[4.0, 1.0], [3.0, 2.0]]).unwrap();
        assert_eq!(c.median(), 2.5);
        assert_eq!(c.max(), 4.0);
        let c = CostMatrix::from_entries(array![[4.0, 1.0, 3.0]]).unwrap();
        assert_eq!(c.median(), 3.0);
    }

    proptest! {
        #[test]
        fn translation_leaves_cost_unchanged(
            src in proptest::collection::vec(-5.0f64..5.0, 6),
            tgt in proptest::collection::vec(-5.0f64..5.0, 4),
            shift in proptest::collection::vec(-100.0f64..100.0, 2),
        ) {
            let s = Array2::from_shape_vec((3, 2), src).unwrap();
            let t = Array2::from_shape_vec((2, 2), tgt).unwrap();
            let d = ndarray::Array1::from(shift);
            let base = squared_euclidean_cost(s.view(), t.view()).unwrap();
            let moved = squared_euclidean_cost((&s + &d).view(), (&t + &d).view()).unwrap();
            for (a, b) in base.entries().iter().zip(moved.entries().iter()) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }
        }
    }
}
