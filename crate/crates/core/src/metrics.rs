//! Gini coefficient of node balances.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("gini coefficient of an empty balance vector is undefined")]
    Empty,
}

/// Gini coefficient via the sorted-rank form
/// `sum_i (2i - n - 1) x_(i) / (n * sum_i x_i)` with 1-based ranks over
/// balances sorted ascending.
///
/// An all-zero vector is perfectly equal and yields `0.0`.
pub fn gini(balances: &[u64]) -> Result<f64, MetricsError> {
    if balances.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut sorted = balances.to_vec();
    sorted.sort_unstable();
    Ok(gini_sorted(&sorted))
}

/// [`gini`] for a slice already sorted ascending. Empty input yields `0.0`.
pub fn gini_sorted(sorted: &[u64]) -> f64 {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted.len() as i128;
    let mut total: i128 = 0;
    let mut weighted: i128 = 0;
    for (idx, &x) in sorted.iter().enumerate() {
        let rank = idx as i128 + 1;
        total += x as i128;
        weighted += (2 * rank - n - 1) * x as i128;
    }
    if total == 0 {
        return 0.0;
    }
    weighted as f64 / (n * total) as f64
}

/// Reference Gini from all pairwise absolute differences,
/// `sum_ij |x_i - x_j| / (2 n sum x)`. Quadratic; meant for cross-checking
/// [`gini`].
pub fn gini_pairwise(balances: &[u64]) -> Result<f64, MetricsError> {
    if balances.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = balances.len() as u128;
    let total: u128 = balances.iter().map(|&x| x as u128).sum();
    if total == 0 {
        return Ok(0.0);
    }
    let mut diffs: u128 = 0;
    for &a in balances {
        for &b in balances {
            diffs += a.abs_diff(b) as u128;
        }
    }
    Ok(diffs as f64 / (2 * n * total) as f64)
}
