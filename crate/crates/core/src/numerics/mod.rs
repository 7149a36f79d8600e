//! Closed forms and root finding behind the reference values: the α sequence,
//! the weighted performance recursion, the four-request decision tree, and
//! the delay thresholds.

mod alpha;
mod dd;
mod lambda;
mod thresholds;
mod tree;

pub use alpha::{alpha, alpha_closed_form, alpha_sequence, AlphaSolution};
pub use lambda::{
    beta, simplification_gap, lambda3_closed, lambda4_closed, terms_at, weighted_lambda, weighted_lambda_with,
    LambdaMode, LambdaQuery, BETA_CAP,
};
pub use thresholds::{i0, thresholds, Thresholds};
pub use tree::{
    leaves, reference_values, regime_by_id, regime_for, regimes, tree_minimax, tree_value, DropSet, TreeMode, TreeRegime,
    TreeSolution,
};

use num_traits::Float;

/// Golden ratio, computed.
pub fn phi() -> f64 {
    (1.0 + Float::sqrt(5.0)) / 2.0
}

/// Finds the sign change of `f` on `[lo, hi]` where `f(lo) > 0 >= f(hi)`.
/// Stops when the bracket no longer shrinks in double precision.
pub(crate) fn bisect_decreasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect_decreasing(0.0, 2.0, |x| 2.0 - x * x);
        assert!((r - Float::sqrt(2.0)).abs() < 1e-15);
    }
}
