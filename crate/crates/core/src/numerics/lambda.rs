//! Optimal weighted performance for delays in `[1/2, 1)`.
//!
//! `λ(n, δ0)` is the best performance when weight `δ0` is already lost, the
//! vehicle is near the middle and the next request has weight 1:
//!
//! * `λ(1, δ0) = 1/(1+δ0)`, `λ(2, δ0) = 1/(2+δ0)`;
//! * for `n >= 3`, `λ(n, δ0)` is the infimum over `δ2 >= 0` of
//!   `max(1/(δ0+1+δ2), min(λ(n-2, (δ0+1+δ2)/δ2), λ(n-1, (δ0+1)/δ2)))`.
//!
//! The first term decreases and the second increases in `δ2`, so the
//! infimum sits at their crossing, found by bisection.

use num_traits::Float;

use super::bisect_decreasing;
use crate::error::{invalid, Error, Result};

/// Largest `n` accepted by [`beta`].
pub const BETA_CAP: usize = 8;

const DELTA2_LO: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    /// Full recursion down to `n = 1, 2`.
    Raw,
    /// Full recursion using the closed forms for `n = 3, 4` as base cases.
    ClosedBase,
    /// Only the `n-2` branch of the inner minimum.
    Simplified,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaQuery {
    pub n: usize,
    pub delta0: f64,
    pub value: f64,
    /// Optimal `δ2` for `n >= 3`.
    pub delta2: Option<f64>,
}

/// `2 / (3 + δ0 + √(δ0² + 2δ0 + 5))`.
pub fn lambda3_closed(d0: f64) -> f64 {
    2.0 / (3.0 + d0 + Float::sqrt(d0 * d0 + 2.0 * d0 + 5.0))
}

/// `2 / (4 + δ0 + √(δ0² + 8))`.
pub fn lambda4_closed(d0: f64) -> f64 {
    2.0 / (4.0 + d0 + Float::sqrt(d0 * d0 + 8.0))
}

fn first_term(d0: f64, d2: f64) -> f64 {
    1.0 / (d0 + 1.0 + d2)
}

fn second_term(n: usize, d0: f64, d2: f64, mode: LambdaMode) -> f64 {
    let skip = lam(n - 2, (d0 + 1.0 + d2) / d2, mode);
    if mode == LambdaMode::Simplified {
        return skip;
    }
    skip.min(lam(n - 1, (d0 + 1.0) / d2, mode))
}

fn optimum(n: usize, d0: f64, mode: LambdaMode) -> (f64, f64) {
    let h = |d2: f64| first_term(d0, d2) - second_term(n, d0, d2, mode);
    let mut hi = d0 + 10.0;
    let mut guard = 0;
    while h(hi) > 0.0 && guard < 60 {
        hi *= 2.0;
        guard += 1;
    }
    let d2 = bisect_decreasing(DELTA2_LO, hi, h);
    let value = first_term(d0, d2).max(second_term(n, d0, d2, mode));
    (value, d2)
}

fn lam(n: usize, d0: f64, mode: LambdaMode) -> f64 {
    match (n, mode) {
        (1, _) => 1.0 / (1.0 + d0),
        (2, _) => 1.0 / (2.0 + d0),
        (3, LambdaMode::ClosedBase) => lambda3_closed(d0),
        (4, LambdaMode::ClosedBase) => lambda4_closed(d0),
        _ => optimum(n, d0, mode).0,
    }
}

fn check(n: usize, d0: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(d0 >= 0.0) || !d0.is_finite() {
        return Err(invalid("delta0 must be a finite non-negative number"));
    }
    Ok(())
}

pub fn weighted_lambda_with(n: usize, d0: f64, mode: LambdaMode) -> Result<LambdaQuery> {
    check(n, d0)?;
    let (value, delta2) = if n <= 2 {
        (lam(n, d0, mode), None)
    } else {
        let (v, d2) = optimum(n, d0, mode);
        (v, Some(d2))
    };
    Ok(LambdaQuery { n, delta0: d0, value, delta2 })
}

pub fn weighted_lambda(n: usize, d0: f64) -> Result<f64> {
    Ok(weighted_lambda_with(n, d0, LambdaMode::ClosedBase)?.value)
}

/// `β_n = λ(n, 0)`.
pub fn beta(n: usize) -> Result<f64> {
    if n > BETA_CAP {
        return Err(Error::Capacity { limit: BETA_CAP, got: n });
    }
    weighted_lambda(n, 0.0)
}

/// `λ(n-2, (δ0+1+δ2)/δ2) - λ(n-1, (δ0+1)/δ2)` at the optimal `δ2`. A
/// non-positive value means the `n-1` branch is never the binding one there.
pub fn simplification_gap(n: usize, d0: f64) -> Result<f64> {
    check(n, d0)?;
    if n < 3 {
        return Err(invalid("the gap is defined for n >= 3"));
    }
    let mode = LambdaMode::ClosedBase;
    let (_, d2) = optimum(n, d0, mode);
    Ok(lam(n - 2, (d0 + 1.0 + d2) / d2, mode) - lam(n - 1, (d0 + 1.0) / d2, mode))
}

/// Terms of the inner problem at a given `δ2`, for monotonicity checks.
pub fn terms_at(n: usize, d0: f64, d2: f64) -> (f64, f64) {
    (first_term(d0, d2), second_term(n, d0, d2, LambdaMode::ClosedBase))
}
