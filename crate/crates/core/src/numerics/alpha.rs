//! The sequence α_n: the smallest achievable maximum of the ratios
//! `δ_i / S_{i+1}` (for `i < n`) and `δ_n / S_n` over positive weight vectors.
//!
//! At the optimum all ratios are equal, which gives the recurrence
//! `δ_1 = 1`, `δ_2 = 1/α - 1`, `δ_{i+1} = (δ_i - δ_{i-1}) / α` together with
//! the closing condition `δ_n = δ_{n-1}`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex;

use super::bisect_decreasing;
use super::dd::Dd;
use crate::error::{invalid, Error, Result};

const LOWER: f64 = 0.25 + 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSolution {
    pub n: usize,
    pub alpha: f64,
    /// Realizing vector, `deltas[0] = 1`.
    pub deltas: Vec<f64>,
    /// `|δ_n - δ_{n-1}|` at the returned α.
    pub residual: f64,
}

impl AlphaSolution {
    /// The n defining ratios, all equal to α at the optimum.
    pub fn ratios(&self) -> Vec<f64> {
        let d = &self.deltas;
        let n = d.len();
        let mut s = 0.0;
        let prefix: Vec<f64> = d.iter().map(|x| {
            s += x;
            s
        }).collect();
        let mut out: Vec<f64> = (0..n.saturating_sub(1)).map(|i| d[i] / prefix[i + 1]).collect();
        out.push(d[n - 1] / prefix[n - 1]);
        out
    }
}

fn recurrence(n: usize, alpha: f64) -> Vec<Dd> {
    let mut d = Vec::with_capacity(n);
    d.push(Dd::new(1.0));
    if n >= 2 {
        d.push(Dd::new(1.0).div_f64(alpha).sub(Dd::new(1.0)));
    }
    for i in 2..n {
        let next = d[i - 1].sub(d[i - 2]).div_f64(alpha);
        d.push(next);
    }
    d
}

fn gap(n: usize, alpha: f64) -> f64 {
    let d = recurrence(n, alpha);
    d[n - 1].sub(d[n - 2]).to_f64()
}

fn solve_next(n: usize, upper: f64) -> Result<AlphaSolution> {
    if !(gap(n, LOWER) > 0.0) || !(gap(n, upper) < 0.0) {
        return Err(Error::Numeric(format!("alpha({n}) is not bracketed on ({LOWER}, {upper}]")));
    }
    let a = bisect_decreasing(LOWER, upper, |x| gap(n, x));
    let d = recurrence(n, a);
    let residual = d[n - 1].sub(d[n - 2]).to_f64().abs();
    Ok(AlphaSolution { n, alpha: a, deltas: d.iter().map(|x| x.to_f64()).collect(), residual })
}

/// α_1, …, α_n with their realizing vectors.
pub fn alpha_sequence(n: usize) -> Result<Vec<AlphaSolution>> {
    if n == 0 {
        return Err(invalid("alpha is defined for n >= 1"));
    }
    let mut out = Vec::with_capacity(n);
    out.push(AlphaSolution { n: 1, alpha: 1.0, deltas: alloc::vec![1.0], residual: 0.0 });
    for k in 2..=n {
        let upper = out[k - 2].alpha;
        out.push(solve_next(k, upper)?);
    }
    Ok(out)
}

pub fn alpha(n: usize) -> Result<AlphaSolution> {
    Ok(alpha_sequence(n)?.pop().expect("non-empty"))
}

/// Evaluates `δ_i = λ r_+^{i-1} + μ r_-^{i-1}` with
/// `r_± = (1 ± √(1-4α)) / (2α)` and `λ, μ = 1/2 ± (1-2α) / (2√(1-4α))`.
pub fn alpha_closed_form(n: usize, alpha: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if !(alpha > 0.25) {
        return Err(invalid("closed form needs alpha > 1/4"));
    }
    let root = Complex::new(1.0 - 4.0 * alpha, 0.0).sqrt();
    let two_a = Complex::new(2.0 * alpha, 0.0);
    let r_plus = (Complex::new(1.0, 0.0) + root) / two_a;
    let r_minus = (Complex::new(1.0, 0.0) - root) / two_a;
    let c = Complex::new(1.0 - 2.0 * alpha, 0.0) / (root * 2.0);
    let lam = Complex::new(0.5, 0.0) + c;
    let mu = Complex::new(0.5, 0.0) - c;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = lam * r_plus.powu(i as u32) + mu * r_minus.powu(i as u32);
        let scale = v.re.abs().max(1.0);
        if v.im.abs() > 1e-9 * scale {
            return Err(Error::Numeric(format!("closed form left imaginary part {} at i={}", v.im, i + 1)));
        }
        out.push(v.re);
    }
    Ok(out)
}
