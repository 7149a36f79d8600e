//! Offline optimum for a fixed instance.
//!
//! A schedule is an order of requests; each one is served at
//! `max(release, arrival)`, which must not exceed its deadline. Since the
//! weight of a schedule only depends on the set it serves, keeping the
//! earliest finishing time per `(set, last request)` loses nothing.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{Instance, Request};
use crate::metric::{MetricSpace, Point};

/// Largest instance the exact solver accepts.
pub const MAX_EXACT: usize = 20;
/// Largest instance the exhaustive search accepts.
pub const MAX_BRUTE: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct OfflineSolution {
    pub value: f64,
    /// Request ids in serving order.
    pub order: Vec<usize>,
    pub serve_times: Vec<f64>,
}

impl OfflineSolution {
    fn empty() -> Self {
        Self { value: 0.0, order: Vec::new(), serve_times: Vec::new() }
    }

    pub fn serves_all(&self, instance: &Instance) -> bool {
        self.order.len() == instance.len()
    }
}

/// Serve times of `order` when started at `start` at time 0, or `None` if some
/// deadline is missed.
pub fn schedule_times(
    space: &MetricSpace,
    start: &Point,
    requests: &[Request],
    order: &[usize],
    tol: f64,
) -> Option<Vec<f64>> {
    let mut t = 0.0;
    let mut at = *start;
    let mut out = Vec::with_capacity(order.len());
    for &id in order {
        let r = requests.get(id)?;
        t = (t + space.dist(&at, &r.location)).max(r.release);
        if t > r.deadline + tol {
            return None;
        }
        at = r.location;
        out.push(t);
    }
    Some(out)
}

fn check(instance: &Instance, limit: usize) -> Result<()> {
    if instance.len() > limit {
        return Err(Error::Capacity { limit, got: instance.len() });
    }
    for r in &instance.requests {
        instance.space.validate(&r.location)?;
    }
    Ok(())
}

fn mask_weight(reqs: &[Request], mask: usize) -> f64 {
    reqs.iter().filter(|r| mask >> r.id & 1 == 1).map(|r| r.weight).sum()
}

/// `true` when subset `a` precedes `b` as sorted id lists.
fn lex_less(a: usize, b: usize) -> bool {
    if a == b {
        return false;
    }
    // the lowest differing id decides; the set containing it comes first
    let low = (a ^ b).trailing_zeros();
    a >> low & 1 == 1
}

struct Best {
    weight: f64,
    finish: f64,
    mask: usize,
    last: Option<usize>,
}

impl Best {
    fn improves(&self, weight: f64, finish: f64, mask: usize, tol: f64) -> bool {
        let scale = self.weight.abs().max(weight.abs()).max(1.0);
        if weight > self.weight + tol * scale {
            return true;
        }
        if weight < self.weight - tol * scale {
            return false;
        }
        if finish < self.finish - tol {
            return true;
        }
        if finish > self.finish + tol {
            return false;
        }
        lex_less(mask, self.mask)
    }
}

/// Exact optimum by dynamic programming over subsets, for up to
/// [`MAX_EXACT`] requests, starting from the space's origin.
pub fn solve(instance: &Instance, tol: f64) -> Result<OfflineSolution> {
    solve_from(instance, &instance.space.origin(), tol)
}

pub fn solve_from(instance: &Instance, start: &Point, tol: f64) -> Result<OfflineSolution> {
    check(instance, MAX_EXACT)?;
    let m = instance.len();
    if m == 0 {
        return Ok(OfflineSolution::empty());
    }
    let space = &instance.space;
    let reqs = instance.requests();
    let full = 1usize << m;
    let mut dp = vec![f64::INFINITY; full * m];
    for r in &reqs {
        let t = space.dist(start, &r.location).max(r.release);
        if t <= r.deadline + tol {
            dp[(1 << r.id) * m + r.id] = t;
        }
    }
    let mut best = Best { weight: 0.0, finish: 0.0, mask: 0, last: None };
    for mask in 1..full {
        let weight = mask_weight(&reqs, mask);
        for last in 0..m {
            let t = dp[mask * m + last];
            if !t.is_finite() {
                continue;
            }
            if best.improves(weight, t, mask, tol) {
                best = Best { weight, finish: t, mask, last: Some(last) };
            }
            let here = &reqs[last].location;
            for r in &reqs {
                if mask >> r.id & 1 == 1 {
                    continue;
                }
                let s = (t + space.dist(here, &r.location)).max(r.release);
                if s > r.deadline + tol {
                    continue;
                }
                let slot = &mut dp[(mask | 1 << r.id) * m + r.id];
                if s < *slot {
                    *slot = s;
                }
            }
        }
    }
    let Some(mut last) = best.last else {
        return Ok(OfflineSolution::empty());
    };

    // Walk back through predecessors that reproduce the stored times.
    let mut mask = best.mask;
    let mut order = vec![last];
    while mask != 1 << last {
        let t = dp[mask * m + last];
        let prev_mask = mask & !(1 << last);
        let r = &reqs[last];
        let prev = (0..m)
            .filter(|&k| prev_mask >> k & 1 == 1)
            .find(|&k| {
                let tk = dp[prev_mask * m + k];
                tk.is_finite() && (tk + space.dist(&reqs[k].location, &r.location)).max(r.release) == t
            })
            .ok_or_else(|| Error::Numeric("offline reconstruction failed".into()))?;
        order.push(prev);
        mask = prev_mask;
        last = prev;
    }
    order.reverse();
    let serve_times = schedule_times(space, start, &reqs, &order, tol)
        .ok_or_else(|| Error::Numeric("offline schedule is infeasible".into()))?;
    Ok(OfflineSolution { value: best.weight, order, serve_times })
}

/// Exhaustive search over all serving orders, for up to [`MAX_BRUTE`]
/// requests. Among optimal orders the first one found in id order is kept.
pub fn brute_force(instance: &Instance, tol: f64) -> Result<OfflineSolution> {
    check(instance, MAX_BRUTE)?;
    let reqs = instance.requests();
    let mut search = Dfs {
        space: &instance.space,
        reqs: &reqs,
        tol,
        used: vec![false; reqs.len()],
        path: Vec::new(),
        times: Vec::new(),
        best: OfflineSolution::empty(),
    };
    search.run(&instance.space.origin(), 0.0, 0);
    Ok(search.best)
}

struct Dfs<'a> {
    space: &'a MetricSpace,
    reqs: &'a [Request],
    tol: f64,
    used: Vec<bool>,
    path: Vec<usize>,
    times: Vec<f64>,
    best: OfflineSolution,
}

impl Dfs<'_> {
    fn run(&mut self, at: &Point, t: f64, mask: usize) {
        // summed in id order so both solvers produce bit-identical values
        let acc = mask_weight(self.reqs, mask);
        if acc > self.best.value {
            self.best = OfflineSolution {
                value: acc,
                order: self.path.clone(),
                serve_times: self.times.clone(),
            };
        }
        for r in self.reqs {
            if self.used[r.id] {
                continue;
            }
            let s = (t + self.space.dist(at, &r.location)).max(r.release);
            if s > r.deadline + self.tol {
                continue;
            }
            self.used[r.id] = true;
            self.path.push(r.id);
            self.times.push(s);
            self.run(&r.location, s, mask | 1 << r.id);
            self.times.pop();
            self.path.pop();
            self.used[r.id] = false;
        }
    }
}
