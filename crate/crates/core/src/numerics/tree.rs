//! The four-request decision tree on the segment.
//!
//! The adversary releases `f1` (weight 1) at `-1` and `f2` (weight `δ2`) at
//! `+1`. If the vehicle keeps going, `f3` (`δ3`) follows at `+1` and then
//! either `f4` (keep again, weight 1) or `f'4` (switch, weight `δ3`). If the
//! vehicle switches, `f'3` (`δ'3`) follows at `-1` and then either `f''4`
//! (switch again, weight `δ'3`) or `f'''4` (keep, weight `δ2`). The vehicle
//! serves exactly one request on each leaf:
//!
//! | leaf | served | released |
//! |------|--------|----------|
//! | keep, keep     | `f1` (1)   | `1 + δ2 + δ3 + δ4`    |
//! | keep, switch   | `f3` (δ3)  | `1 + δ2 + δ3 + δ'4`   |
//! | switch, switch | `f'3` (δ'3)| `1 + δ2 + δ'3 + δ''4` |
//! | switch, keep   | `f2` (δ2)  | `1 + δ2 + δ'3 + δ'''4`|
//!
//! Larger delays stop the adversary from releasing some of these requests in
//! time (or, for the competitive ratio, from keeping the offline schedule
//! feasible); a dropped request contributes no weight.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::bisect_decreasing;
use crate::error::{precondition, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DropSet {
    pub f3: bool,
    pub f4: bool,
    pub f4p: bool,
    pub f4pp: bool,
    pub f4ppp: bool,
}

impl DropSet {
    pub const NONE: DropSet = DropSet { f3: false, f4: false, f4p: false, f4pp: false, f4ppp: false };

    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (on, name) in [
            (self.f3, "f3"),
            (self.f4, "f4"),
            (self.f4p, "f'4"),
            (self.f4pp, "f''4"),
            (self.f4ppp, "f'''4"),
        ] {
            if on {
                v.push(name);
            }
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeMode {
    Performance,
    Competitive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeRegime {
    pub id: &'static str,
    pub mode: TreeMode,
    /// Delay interval `[t_lo, t_hi)`.
    pub t_lo: f64,
    pub t_hi: f64,
    pub drops: DropSet,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeSolution {
    pub value: f64,
    pub delta2: f64,
    /// `None` when `f3` is dropped.
    pub delta3: Option<f64>,
    pub delta3p: f64,
}

const IDS: [(&str, f64, f64); 6] = [
    ("lt-1/6", 0.0, 1.0 / 6.0),
    ("1/6-1/5", 1.0 / 6.0, 0.2),
    ("1/5-1/4", 0.2, 0.25),
    ("1/4-1/3", 0.25, 1.0 / 3.0),
    ("1/3-1/2", 1.0 / 3.0, 0.5),
    ("1/2-1", 0.5, 1.0),
];

fn drops_for(mode: TreeMode, idx: usize) -> DropSet {
    let mut d = DropSet::NONE;
    match (mode, idx) {
        (TreeMode::Performance, 0..=3) => {}
        (TreeMode::Performance, 4) => d.f4 = true,
        (TreeMode::Performance, _) => {
            d.f3 = true;
            d.f4 = true;
            d.f4p = true;
        }
        (TreeMode::Competitive, 0) => {}
        (TreeMode::Competitive, 1) => d.f4pp = true,
        (TreeMode::Competitive, 2) => d.f4 = true,
        (TreeMode::Competitive, 3) => {
            d.f4 = true;
            d.f4pp = true;
        }
        (TreeMode::Competitive, 4) => {
            d.f4 = true;
            d.f4ppp = true;
        }
        (TreeMode::Competitive, _) => {
            d.f3 = true;
            d.f4 = true;
            d.f4p = true;
            d.f4pp = true;
        }
    }
    d
}

/// All regimes of one mode, in increasing delay order.
pub fn regimes(mode: TreeMode) -> Vec<TreeRegime> {
    IDS.iter()
        .enumerate()
        .map(|(i, &(id, t_lo, t_hi))| TreeRegime { id, mode, t_lo, t_hi, drops: drops_for(mode, i) })
        .collect()
}

pub fn regime_by_id(mode: TreeMode, id: &str) -> Result<TreeRegime> {
    regimes(mode)
        .into_iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::Unknown(alloc::format!("regime {id}")))
}

/// The regime containing delay `t`, for `0 <= t < 1`.
pub fn regime_for(mode: TreeMode, t: f64) -> Result<TreeRegime> {
    regimes(mode)
        .into_iter()
        .find(|r| r.t_lo <= t && t < r.t_hi)
        .ok_or_else(|| precondition("the decision tree covers delays 0 <= T < 1"))
}

fn on(present: bool, w: f64) -> f64 {
    if present {
        w
    } else {
        0.0
    }
}

/// The four leaf ratios `[keep-keep, keep-switch, switch-switch, switch-keep]`.
/// The keep-switch leaf is `None` when `f3` is dropped, and keep-keep then
/// ends after `f2`.
pub fn leaves(d: &DropSet, d2: f64, d3: f64, d3p: f64) -> [Option<f64>; 4] {
    let d3 = on(!d.f3, d3);
    let kk = 1.0 / (1.0 + d2 + d3 + on(!d.f3 && !d.f4, 1.0));
    let ks = (!d.f3).then(|| d3 / (1.0 + d2 + d3 + on(!d.f4p, d3)));
    let ss = d3p / (1.0 + d2 + d3p + on(!d.f4pp, d3p));
    let sk = d2 / (1.0 + d2 + d3p + on(!d.f4ppp, d2));
    [Some(kk), ks, Some(ss), Some(sk)]
}

/// Adversary value for fixed weights: the best leaf for the vehicle.
pub fn tree_value(d: &DropSet, d2: f64, d3: f64, d3p: f64) -> f64 {
    leaves(d, d2, d3, d3p).iter().flatten().fold(0.0, |a: f64, &b| a.max(b))
}

fn expand(f: &impl Fn(f64) -> f64, start: f64) -> f64 {
    let mut hi = start;
    for _ in 0..80 {
        if f(hi) <= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    hi
}

/// Value of the keep branch for a given `δ2`, with its optimal `δ3`.
fn keep_branch(d: &DropSet, d2: f64) -> (f64, Option<f64>) {
    if d.f3 {
        return (1.0 / (1.0 + d2), None);
    }
    let gap = |d3: f64| {
        let l = leaves(d, d2, d3, 0.0);
        l[0].unwrap() - l[1].unwrap()
    };
    let d3 = bisect_decreasing(0.0, expand(&gap, 4.0), gap);
    let l = leaves(d, d2, d3, 0.0);
    (l[0].unwrap().max(l[1].unwrap()), Some(d3))
}

/// Value of the switch branch for a given `δ2`, with its optimal `δ'3`.
fn switch_branch(d: &DropSet, d2: f64) -> (f64, f64) {
    let gap = |d3p: f64| {
        let l = leaves(d, d2, 0.0, d3p);
        l[3].unwrap() - l[2].unwrap()
    };
    let d3p = bisect_decreasing(0.0, expand(&gap, 4.0), gap);
    let l = leaves(d, d2, 0.0, d3p);
    (l[2].unwrap().max(l[3].unwrap()), d3p)
}

/// Nested min-max by equalization: each inner minimum balances a decreasing
/// leaf against an increasing one, and the outer minimum balances the keep
/// branch (decreasing in `δ2`) against the switch branch (increasing).
pub fn tree_minimax(regime: &TreeRegime) -> TreeSolution {
    let d = regime.drops;
    let gap = |d2: f64| keep_branch(&d, d2).0 - switch_branch(&d, d2).0;
    let d2 = bisect_decreasing(1e-12, expand(&gap, 4.0), gap);
    let (a, d3) = keep_branch(&d, d2);
    let (b, d3p) = switch_branch(&d, d2);
    TreeSolution { value: a.max(b), delta2: d2, delta3: d3, delta3p: d3p }
}

/// Reference values of the n = 4 table, computed from closed forms where
/// they exist.
pub fn reference_values(mode: TreeMode) -> Vec<f64> {
    let s2 = Float::sqrt(2.0);
    let s3 = Float::sqrt(3.0);
    match mode {
        TreeMode::Performance => vec![0.25, 0.25, 0.25, 0.25, 2.0 - s3, 1.0 - s2 / 2.0],
        TreeMode::Competitive => vec![0.25, 0.2578, 2.0 - s3, 0.2803, 1.0 - s2 / 2.0, 0.3177],
    }
}
