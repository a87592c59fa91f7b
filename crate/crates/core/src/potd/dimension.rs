use crate::error::{invalid, PotdError, Result};

/// Default cumulative singular-value ratio for automatic dimension choice.
pub const DEFAULT_DIMENSION_THRESHOLD: f64 = 0.90;

/// Smallest `r` whose leading singular values carry at least `threshold` of
/// the total.
pub fn estimate_dimension(singular_values: &[f64], threshold: f64) -> Result<usize> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return invalid(format!("threshold must lie in (0, 1], got {threshold}"));
    }
    if singular_values.iter().any(|s| !(s >= &0.0) || !s.is_finite()) {
        return invalid("singular values must be finite and nonnegative");
    }
    if singular_values.windows(2).any(|w| w[1] > w[0]) {
        return invalid("singular values must be sorted nonincreasing");
    }
    let total: f64 = singular_values.iter().sum();
    if !(total > 0.0) {
        return Err(PotdError::Degenerate("all singular values are zero".into()));
    }
    let mut cumulative = 0.0;
    for (r, s) in singular_values.iter().enumerate() {
        cumulative += s;
        if cumulative / total >= threshold - 1e-12 {
            return Ok(r + 1);
        }
    }
    Ok(singular_values.len())
}
