//! Delay thresholds that separate the regimes of the game.

use num_traits::Float;

use crate::error::{precondition, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub n: usize,
    /// Below this delay the performance is `1/n`: `1/(2^{n-3}+1)`.
    pub t0: f64,
    /// Below this delay the competitive ratio is `1/n`: `1/(2^{n-1}-2)`.
    pub t1: f64,
    /// Improvement over `1/n` reachable from `t0`: `1/(n(n-1)(n+3))`.
    pub epsilon: f64,
}

pub fn thresholds(n: usize) -> Result<Thresholds> {
    if n < 3 {
        return Err(precondition("thresholds are defined for n >= 3"));
    }
    let nf = n as f64;
    Ok(Thresholds {
        n,
        t0: 1.0 / (Float::powi(2.0, n as i32 - 3) + 1.0),
        t1: 1.0 / (Float::powi(2.0, n as i32 - 1) - 2.0),
        epsilon: 1.0 / (nf * (nf - 1.0) * (nf + 3.0)),
    })
}

/// Number of requests the adversary can burn before the vehicle can cover
/// the whole segment between releases: `floor(1/(2-T))`, for `T < 2`.
pub fn i0(t: f64) -> Result<usize> {
    if !(0.0..2.0).contains(&t) {
        return Err(precondition("i0 needs 0 <= T < 2"));
    }
    Ok(Float::floor(1.0 / (2.0 - t)) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let t = thresholds(4).unwrap();
        assert_eq!(t.t0, 1.0 / 3.0);
        assert_eq!(t.t1, 1.0 / 6.0);
        assert_eq!(t.epsilon, 1.0 / 84.0);
        let t = thresholds(3).unwrap();
        assert_eq!((t.t0, t.t1), (0.5, 0.5));
        assert!(thresholds(2).is_err());
        assert_eq!(i0(1.0).unwrap(), 1);
        assert_eq!(i0(1.5).unwrap(), 2);
        assert_eq!(i0(0.9).unwrap(), 0);
        assert!(i0(2.0).is_err());
    }
}
