#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Minimum of `Σ_i c[i, σ(i)] / n` over all permutations, by Heap's algorithm.
pub fn brute_force_assignment_cost(c: &Array2<f64>) -> f64 {
    let n = c.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let cost = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| c[[i, j]]).sum::<f64>();
    let mut best = cost(&perm);
    let mut stack = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            best = best.min(cost(&perm));
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    best / n as f64
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, p), |_| StandardNormal.sample(rng))
}

pub fn sq_dist_cost(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.nrows(), b.nrows()), |(i, j)| {
        a.row(i).iter().zip(b.row(j)).map(|(x, y)| (x - y).powi(2)).sum()
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random orthogonal matrix from QR of a Gaussian matrix (Gram-Schmidt).
pub fn random_orthogonal(rng: &mut ChaCha8Rng, p: usize) -> Array2<f64> {
    let mut q = random_points(rng, p, p);
    for j in 0..p {
        for k in 0..j {
            let d = q.column(j).dot(&q.column(k));
            let col = q.column(k).to_owned();
            q.column_mut(j).scaled_add(-d, &col);
        }
        let norm = q.column(j).dot(&q.column(j)).sqrt();
        q.column_mut(j).mapv_inplace(|v| v / norm);
    }
    q
}

/// Labels for `n` rows drawn from `k` classes, every class present.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<String> {
    (0..n)
        .map(|i| if i < k { i } else { rng.random_range(0..k) })
        .map(|c| format!("c{c}"))
        .collect()
}

pub fn bundled_csv(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}
