use ndarray::ArrayView2;

use crate::dataset::LabeledDataset;
use crate::error::{invalid, Result};

/// Default neighbourhood size.
pub const DEFAULT_K: usize = 10;

/// Majority vote among the `k` nearest training points (Euclidean).
///
/// Equal distances are ordered by training row index, and tied votes go to
/// the smallest class code. Returns class codes of `train`.
pub fn knn_predict(train: &LabeledDataset, test_points: ArrayView2<'_, f64>, k: usize) -> Result<Vec<usize>> {
    let n = train.n();
    if n == 0 {
        return invalid("empty training set");
    }
    if k == 0 || k > n {
        return invalid(format!("K must be in 1..={n}, got {k}"));
    }
    if test_points.ncols() != train.p() {
        return invalid(format!(
            "test points have {} columns, training data {}",
            test_points.ncols(),
            train.p()
        ));
    }
    let codes = train.codes()?;
    let n_classes = train.num_classes()?;
    let x = train.x();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut predictions = Vec::with_capacity(test_points.nrows());
    for q in test_points.rows() {
        order.clear();
        order.extend(x.rows().into_iter().enumerate().map(|(i, row)| {
            let d: f64 = row.iter().zip(q.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, i)
        }));
        order.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; n_classes];
        for &(_, i) in &order[..k] {
            votes[codes[i]] += 1;
        }
        let best = votes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(c, _)| c)
            .unwrap_or(0);
        predictions.push(best);
    }
    Ok(predictions)
}

/// Fraction of positions where the two label vectors agree.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return invalid(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        ));
    }
    if truth.is_empty() {
        return invalid("no predictions to score");
    }
    let correct = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / truth.len() as f64)
}

/// Complement of [`accuracy`].
pub fn error_rate(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    accuracy(predicted, truth).map(|a| 1.0 - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn one_nn_returns_own_label() {
        let train = LabeledDataset::categorical(array![[0.0, 0.0], [5.0, 5.0]], &["a", "b"]).unwrap();
        let pred = knn_predict(&train, array![[5.0, 5.0], [0.0, 0.0]].view(), 1).unwrap();
        assert_eq!(pred, vec![1, 0]);
    }

    #[test]
    fn full_k_predicts_majority() {
        let train = LabeledDataset::categorical(array![[0.0], [1.0], [2.0]], &["a", "b", "b"]).unwrap();
        let pred = knn_predict(&train, array![[-10.0], [10.0]].view(), 3).unwrap();
        assert_eq!(pred, vec![1, 1]);
    }

    #[test]
    fn ties_resolve_deterministically() {
        // equidistant neighbours: lower row index wins the slot
        let train = LabeledDataset::categorical(array![[1.0], [-1.0]], &["b", "a"]).unwrap();
        assert_eq!(knn_predict(&train, array![[0.0]].view(), 1).unwrap(), vec![1]);
        // split vote: smallest class code wins
        assert_eq!(knn_predict(&train, array![[0.0]].view(), 2).unwrap(), vec![0]);
    }

    #[test]
    fn separated_blobs_are_classified() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let make = |rng: &mut ChaCha8Rng, n: usize| {
            let mut x = Array2::zeros((2 * n, 3));
            let mut labels = Vec::new();
            for i in 0..2 * n {
                let shift = if i < n { 0.0 } else { 10.0 };
                for j in 0..3 {
                    x[[i, j]] = normal.sample(rng) + if j == 0 { shift } else { 0.0 };
                }
                labels.push(if i < n { "a" } else { "b" });
            }
            LabeledDataset::categorical(x, &labels).unwrap()
        };
        let train = make(&mut rng, 100);
        let test = make(&mut rng, 100);
        let pred = knn_predict(&train, test.x(), 10).unwrap();
        assert!(accuracy(&pred, test.codes().unwrap()).unwrap() >= 0.99);
    }

    #[test]
    fn invalid_k() {
        let train = LabeledDataset::categorical(array![[0.0], [1.0]], &["a", "b"]).unwrap();
        assert!(knn_predict(&train, array![[0.0]].view(), 0).is_err());
        assert!(knn_predict(&train, array![[0.0]].view(), 3).is_err());
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 1], &[2, 2]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 1, 1], &[0, 1, 1, 0]).unwrap(), 0.75);
        assert!(accuracy(&[1], &[1, 2]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn accuracy_and_error_rate_sum_to_one() {
        for n in 1..=300usize {
            for correct in 0..=n {
                let truth = vec![0usize; n];
                let pred: Vec<usize> = (0..n).map(|i| usize::from(i >= correct)).collect();
                let a = accuracy(&pred, &truth).unwrap();
                let e = error_rate(&pred, &truth).unwrap();
                assert_eq!(a + e, 1.0, "n={n} correct={correct}");
            }
        }
    }
}
