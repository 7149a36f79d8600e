//! Adaptive adversaries from the lower-bound constructions.
//!
//! Each strategy schedules one release at a time. Right after the policy
//! reacts to a release, the strategy looks at the new heading and schedules
//! the next release, or stops.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{precondition, Error, Result};
use crate::game::{Adversary, GameView, Plan, Trigger};
use crate::metric::{MetricSpace, Point};
use crate::numerics::{self, phi};

/// Names accepted by [`adversary_by_name`].
pub const ADVERSARY_NAMES: [&str; 7] = [
    "no_delay",
    "small_delay_perf",
    "small_delay_cr",
    "large_delay",
    "n3_golden",
    "n4_medium",
    "star_counterexample",
];

/// A release planned for time `at`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pending {
    pub at: f64,
    pub location: Point,
    pub weight: f64,
}

/// A release script that reacts to the vehicle's heading.
pub trait Strategy {
    fn name(&self) -> &str;
    /// The first release.
    fn start(&mut self) -> Option<Pending>;
    /// Checked at the scheduled time; `false` cancels this release and every
    /// later one.
    fn confirm(&mut self, _view: &GameView<'_>, _next: &Pending) -> bool {
        true
    }
    /// Called once the policy has reacted to the latest release.
    fn react(&mut self, view: &GameView<'_>) -> Option<Pending>;
    fn offline_serves_all(&self) -> bool {
        true
    }
}

/// Runs a [`Strategy`] as an [`Adversary`].
pub struct Driver<S> {
    strategy: S,
    pending: Option<Pending>,
    awaiting: bool,
}

impl<S: Strategy> Driver<S> {
    pub fn new(strategy: S) -> Self {
        Self { strategy, pending: None, awaiting: false }
    }

    pub fn strategy(&self) -> &S {
        &self.strategy
    }

    fn wake(&self) -> Plan {
        Plan { release: None, wake_at: self.pending.map(|p| p.at) }
    }
}

impl<S: Strategy> Adversary for Driver<S> {
    fn name(&self) -> &str {
        self.strategy.name()
    }

    fn plan(&mut self, trigger: Trigger, view: &GameView<'_>) -> Result<Plan> {
        match trigger {
            Trigger::Start => {
                self.pending = self.strategy.start();
                Ok(self.wake())
            }
            Trigger::Wake => match self.pending {
                Some(p) if p.at <= view.time() + view.tol() => {
                    self.pending = None;
                    if !self.strategy.confirm(view, &p) {
                        return Ok(Plan::idle());
                    }
                    self.awaiting = true;
                    Ok(Plan::release(p.location, p.weight))
                }
                _ => Ok(self.wake()),
            },
            Trigger::Observe => {
                if self.awaiting {
                    self.awaiting = false;
                    self.pending = self.strategy.react(view);
                    if let Some(p) = self.pending {
                        if p.at < view.time() - view.tol() {
                            return Err(Error::Protocol(format!(
                                "{} scheduled a release in the past ({} < {})",
                                self.strategy.name(),
                                p.at,
                                view.time()
                            )));
                        }
                    }
                }
                Ok(self.wake())
            }
        }
    }

    fn offline_serves_all(&self) -> bool {
        self.strategy.offline_serves_all()
    }
}

fn seg(x: f64) -> Point {
    Point::Segment(x)
}

/// `(-1)^i`.
fn alt(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn heading_to(view: &GameView<'_>, p: &Point) -> bool {
    view.space().dist(&view.vehicle.target, p) <= view.tol()
}

fn last_release(view: &GameView<'_>) -> Option<(f64, Point)> {
    view.requests.last().map(|s| (s.request.release, s.request.location))
}

/// Zero delay: each time the vehicle commits to an end, requests appear at
/// the other end shortly before its arrival, at `τ - 1/(4·3^k·n)`, with `k`
/// restarting after each change of direction.
#[derive(Clone, Debug)]
pub struct NoDelay {
    n: usize,
    i: usize,
    k: i32,
    tau: f64,
}

impl NoDelay {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(precondition("no_delay needs n >= 1"));
        }
        Ok(Self { n, i: 1, k: 0, tau: 0.0 })
    }

    fn next(&self, view: &GameView<'_>) -> Option<Pending> {
        if view.released() >= self.n {
            return None;
        }
        let offset = 1.0 / (4.0 * Float::powi(3.0, self.k) * self.n as f64);
        Some(Pending { at: self.tau - offset, location: seg(alt(self.i + 1)), weight: 1.0 })
    }
}

impl Strategy for NoDelay {
    fn name(&self) -> &str {
        "no_delay"
    }

    fn start(&mut self) -> Option<Pending> {
        Some(Pending { at: 1.0, location: seg(-1.0), weight: 1.0 })
    }

    fn react(&mut self, view: &GameView<'_>) -> Option<Pending> {
        let (_, loc) = last_release(view)?;
        if view.released() == 1 {
            if !heading_to(view, &loc) {
                return None;
            }
            self.tau = view.vehicle.eta(view.space(), &loc);
        } else if heading_to(view, &loc) {
            self.i += 1;
            self.k = 0;
            self.tau = view.vehicle.eta(view.space(), &loc);
        } else {
            self.k += 1;
        }
        self.next(view)
    }
}

/// Small delay, performance bound: a fixed schedule with `f1` at `-1` and
/// every later request at `+1`, timed so that a vehicle that keeps heading
/// to the nearer of two equal requests never has time to turn back.
#[derive(Clone, Debug)]
pub struct SmallDelayPerf {
    times: Vec<f64>,
    next: usize,
}

impl SmallDelayPerf {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        let th = numerics::thresholds(n).map_err(|_| precondition("small_delay_perf needs n >= 3"))?;
        if !(0.0..th.t0).contains(&t) {
            return Err(precondition(format!(
                "small_delay_perf needs 0 <= T < T0 = {} for n = {n}, got T = {t}",
                th.t0
            )));
        }
        Ok(Self { times: Self::schedule(n, t), next: 0 })
    }

    /// `t_1 = 1`, `t_i = 2 - (1-T)/2^{i-2} + (1-T)/2^{n-2} - T/2` for
    /// `2 <= i <= n-1`, and `t_n = t_{n-1} + T`.
    pub fn schedule(n: usize, t: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(n);
        v.push(1.0);
        let tail = (1.0 - t) / Float::powi(2.0, n as i32 - 2);
        for i in 2..n {
            v.push(2.0 - (1.0 - t) / Float::powi(2.0, i as i32 - 2) + tail - t / 2.0);
        }
        let last = *v.last().expect("non-empty");
        if n >= 2 {
            v.push(last + t);
        }
        v
    }

    fn pending(&self) -> Option<Pending> {
        let at = *self.times.get(self.next)?;
        let x = if self.next == 0 { -1.0 } else { 1.0 };
        Some(Pending { at, location: seg(x), weight: 1.0 })
    }
}

impl Strategy for SmallDelayPerf {
    fn name(&self) -> &str {
        "small_delay_perf"
    }

    fn start(&mut self) -> Option<Pending> {
        self.pending()
    }

    fn react(&mut self, _view: &GameView<'_>) -> Option<Pending> {
        self.next += 1;
        self.pending()
    }

    fn offline_serves_all(&self) -> bool {
        false
    }
}

/// Small delay, competitive bound: like [`NoDelay`] with the doubling
/// offsets `2^{n-2-i-k}(T+2ε) - ε` before the ETA, `n - 1` requests in total,
/// and a last one at `τ - ε` at the far end.
#[derive(Clone, Debug)]
pub struct SmallDelayCr {
    n: usize,
    t: f64,
    eps: f64,
    i: usize,
    k: i32,
    tau: f64,
}

impl SmallDelayCr {
    /// `min(T, T1·2^{-n}) / 10`.
    pub fn default_epsilon(n: usize, t: f64) -> Result<f64> {
        let t1 = numerics::thresholds(n)?.t1;
        Ok(t.min(t1 * Float::powi(2.0, -(n as i32))) / 10.0)
    }

    pub fn new(n: usize, t: f64, eps: Option<f64>) -> Result<Self> {
        let th = numerics::thresholds(n).map_err(|_| precondition("small_delay_cr needs n >= 3"))?;
        if !(t > 0.0 && t < th.t1) {
            return Err(precondition(format!(
                "small_delay_cr needs 0 < T < T1 = {} for n = {n}, got T = {t}",
                th.t1
            )));
        }
        let eps = match eps {
            Some(e) => e,
            None => Self::default_epsilon(n, t)?,
        };
        if !(eps > 0.0 && eps < t) {
            return Err(precondition(format!("small_delay_cr needs 0 < eps < T, got eps = {eps}")));
        }
        Ok(Self { n, t, eps, i: 1, k: 0, tau: 0.0 })
    }

    fn next(&self, view: &GameView<'_>) -> Option<Pending> {
        let released = view.released();
        if released >= self.n {
            return None;
        }
        let loc = seg(alt(self.i + 1));
        if released == self.n - 1 {
            return Some(Pending { at: self.tau - self.eps, location: loc, weight: 1.0 });
        }
        let e = self.n as i32 - 2 - self.i as i32 - self.k;
        let at = self.tau - Float::powi(2.0, e) * (self.t + 2.0 * self.eps) + self.eps;
        Some(Pending { at, location: loc, weight: 1.0 })
    }
}

impl Strategy for SmallDelayCr {
    fn name(&self) -> &str {
        "small_delay_cr"
    }

    fn start(&mut self) -> Option<Pending> {
        Some(Pending { at: 1.0, location: seg(-1.0), weight: 1.0 })
    }

    fn react(&mut self, view: &GameView<'_>) -> Option<Pending> {
        let (_, loc) = last_release(view)?;
        if view.released() == 1 {
            if !heading_to(view, &loc) {
                return None;
            }
            self.tau = view.vehicle.eta(view.space(), &loc);
        } else if heading_to(view, &loc) {
            self.i += 1;
            self.k = 0;
            self.tau = view.vehicle.eta(view.space(), &loc);
        } else {
            self.k += 1;
        }
        self.next(view)
    }
}

/// Large delay `1 <= T < 2 - 1/(n-1)`. While the vehicle serves everything,
/// `i0` light requests `4^{i-1}ε` alternate ends one delay apart; then the
/// α-realizing weights follow at `2i - 2 - η_i` with
/// `η_i = (i-i0)/n - 3/(2n)`, until the vehicle serves one of them.
///
/// Release times are pushed back to `last + T` when the nominal time would
/// violate the delay. Whether earlier requests were served is checked at the
/// scheduled release time.
#[derive(Clone, Debug)]
pub struct LargeDelay {
    n: usize,
    t: f64,
    eps: f64,
    i0: usize,
    deltas: Vec<f64>,
    next_index: usize,
}

impl LargeDelay {
    pub const DEFAULT_EPS: f64 = 1e-4;

    pub fn new(n: usize, t: f64, eps: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(precondition("large_delay needs n >= 2"));
        }
        let upper = 2.0 - 1.0 / (n as f64 - 1.0);
        if !(t >= 1.0 && t < upper) {
            return Err(precondition(format!(
                "large_delay needs 1 <= T < 2 - 1/(n-1) = {upper} for n = {n}, got T = {t}"
            )));
        }
        let eps = eps.unwrap_or(Self::DEFAULT_EPS);
        if !(eps > 0.0) {
            return Err(precondition("large_delay needs eps > 0"));
        }
        let i0 = numerics::i0(t)?;
        let deltas = numerics::alpha(n - i0)?.deltas;
        Ok(Self { n, t, eps, i0, deltas, next_index: 1 })
    }

    pub fn i0(&self) -> usize {
        self.i0
    }

    /// Nominal release time of `f_i` (1-based).
    pub fn nominal_time(&self, i: usize) -> f64 {
        if i <= self.i0 + 1 {
            1.0 + (i as f64 - 1.0) * self.t
        } else {
            let nf = self.n as f64;
            let eta = (i - self.i0) as f64 / nf - 3.0 / (2.0 * nf);
            2.0 * i as f64 - 2.0 - eta
        }
    }

    fn pending(&self, i: usize, last: Option<f64>) -> Option<Pending> {
        if i > self.n {
            return None;
        }
        let weight = if i <= self.i0 {
            Float::powi(4.0, i as i32 - 1) * self.eps
        } else {
            self.deltas[i - self.i0 - 1]
        };
        let mut at = self.nominal_time(i);
        if let Some(l) = last {
            at = at.max(l + self.t);
        }
        Some(Pending { at, location: seg(alt(i)), weight })
    }
}

impl Strategy for LargeDelay {
    fn name(&self) -> &str {
        "large_delay"
    }

    fn start(&mut self) -> Option<Pending> {
        self.pending(1, None)
    }

    fn confirm(&mut self, view: &GameView<'_>, _next: &Pending) -> bool {
        let i = self.next_index;
        if i <= self.i0 + 1 {
            (0..i - 1).all(|id| view.is_served(id))
        } else {
            !(self.i0..view.released()).any(|id| view.is_served(id))
        }
    }

    fn react(&mut self, view: &GameView<'_>) -> Option<Pending> {
        self.next_index += 1;
        self.pending(self.next_index, last_release(view).map(|l| l.0))
    }
}

/// Three requests, `1/2 <= T < 1`: `f1 = (-1, 1, 1)`, then `f2 = (+1, 2-ε, φ)`,
/// and `f3 = (-1, 4-3ε, φ)` only if the vehicle turns towards `f2`.
#[derive(Clone, Debug)]
pub struct N3Golden {
    eps: f64,
}

impl N3Golden {
    pub fn default_epsilon(t: f64) -> f64 {
        (1.0 / 3.0).min(1.0 - t) / 2.0
    }

    pub fn new(t: f64, eps: Option<f64>) -> Result<Self> {
        if !(0.5..1.0).contains(&t) {
            return Err(precondition(format!("n3_golden needs 1/2 <= T < 1, got T = {t}")));
        }
        let eps = eps.unwrap_or_else(|| Self::default_epsilon(t));
        if !(eps > 0.0 && eps < (1.0 / 3.0).min(1.0 - t)) {
            return Err(precondition(format!("n3_golden needs 0 < eps < min(1/3, 1-T), got eps = {eps}")));
        }
        Ok(Self { eps })
    }
}

impl Strategy for N3Golden {
    fn name(&self) -> &str {
        "n3_golden"
    }

    fn start(&mut self) -> Option<Pending> {
        Some(Pending { at: 1.0, location: seg(-1.0), weight: 1.0 })
    }

    fn react(&mut self, view: &GameView<'_>) -> Option<Pending> {
        match view.released() {
            1 if heading_to(view, &seg(-1.0)) => {
                Some(Pending { at: 2.0 - self.eps, location: seg(1.0), weight: phi() })
            }
            2 if heading_to(view, &seg(1.0)) => {
                Some(Pending { at: 4.0 - 3.0 * self.eps, location: seg(-1.0), weight: phi() })
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Branch {
    Root,
    Kept,
    Switched,
}

/// Four requests, `1/3 <= T < 1/2`, with `ε = 1/2 - T`, following the
/// decision tree in which the vehicle can never serve two requests.
#[derive(Clone, Debug)]
pub struct N4Medium {
    t: f64,
    eps: f64,
    d2: f64,
    d3: f64,
    branch: Branch,
}

impl N4Medium {
    /// `δ2 = (1+√3)/2`, the positive root of `2X³ - 3X - 1` other than -1.
    pub fn delta2() -> f64 {
        (1.0 + Float::sqrt(3.0)) / 2.0
    }

    /// `δ3 = (1-δ2)/2 + √(δ2² + 2δ2 + 5)/2`.
    pub fn delta3(d2: f64) -> f64 {
        (1.0 - d2) / 2.0 + Float::sqrt(d2 * d2 + 2.0 * d2 + 5.0) / 2.0
    }

    pub fn new(t: f64) -> Result<Self> {
        if !(1.0 / 3.0..0.5).contains(&t) {
            return Err(precondition(format!("n4_medium needs 1/3 <= T < 1/2, got T = {t}")));
        }
        let d2 = Self::delta2();
        Ok(Self { t, eps: 0.5 - t, d2, d3: Self::delta3(d2), branch: Branch::Root })
    }
}

impl Strategy for N4Medium {
    fn name(&self) -> &str {
        "n4_medium"
    }

    fn start(&mut self) -> Option<Pending> {
        Some(Pending { at: 1.0, location: seg(-1.0), weight: 1.0 })
    }

    fn react(&mut self, view: &GameView<'_>) -> Option<Pending> {
        let (t, e) = (self.t, self.eps);
        let left = heading_to(view, &seg(-1.0));
        let right = heading_to(view, &seg(1.0));
        match (view.released(), self.branch) {
            (1, _) if left => Some(Pending { at: 2.0 - t - e, location: seg(1.0), weight: self.d2 }),
            (2, _) if left => {
                self.branch = Branch::Kept;
                Some(Pending { at: 2.0 - e, location: seg(1.0), weight: self.d3 })
            }
            (2, _) if right => {
                self.branch = Branch::Switched;
                Some(Pending { at: 4.0 - 3.0 * t - 3.0 * e, location: seg(-1.0), weight: self.d2 })
            }
            (3, Branch::Kept) if right => {
                Some(Pending { at: 4.0 - 3.0 * e, location: seg(-1.0), weight: self.d3 })
            }
            (3, Branch::Switched) if left => {
                Some(Pending { at: 6.0 - 4.0 * t - 5.0 * e, location: seg(1.0), weight: self.d2 })
            }
            (3, Branch::Switched) if right => {
                Some(Pending { at: 4.0 - 2.0 * t - 3.0 * e, location: seg(-1.0), weight: self.d2 })
            }
            _ => None,
        }
    }

    fn offline_serves_all(&self) -> bool {
        false
    }
}

/// Five unit requests on a three-branch star with `T < 1/4`: `f1` at tip `A`
/// and, while the vehicle keeps heading to `A`, one request at `B` and three
/// at `C` at times `2-3T-ε`, `2-2T-ε`, `2-T-ε` and `2-ε`.
///
/// The same schedule can be replayed on the segment with `A = -1` and
/// `B = C = +1`.
#[derive(Clone, Debug)]
pub struct StarCounterexample {
    t: f64,
    eps: f64,
    tips: [Point; 3],
    next: usize,
}

impl StarCounterexample {
    pub fn default_epsilon(t: f64) -> f64 {
        (1.0 - 4.0 * t) / 2.0
    }

    fn checked(t: f64, eps: Option<f64>) -> Result<(f64, f64)> {
        if !(0.0..0.25).contains(&t) {
            return Err(precondition(format!("star_counterexample needs 0 <= T < 1/4, got T = {t}")));
        }
        let eps = eps.unwrap_or_else(|| Self::default_epsilon(t));
        if !(eps > 0.0 && eps < 1.0 - 4.0 * t) {
            return Err(precondition(format!("star_counterexample needs 0 < eps < 1 - 4T, got eps = {eps}")));
        }
        Ok((t, eps))
    }

    pub fn new(t: f64, eps: Option<f64>) -> Result<Self> {
        let (t, eps) = Self::checked(t, eps)?;
        Ok(Self { t, eps, tips: [Point::star(0, 1.0), Point::star(1, 1.0), Point::star(2, 1.0)], next: 0 })
    }

    pub fn on_segment(t: f64, eps: Option<f64>) -> Result<Self> {
        let (t, eps) = Self::checked(t, eps)?;
        Ok(Self { t, eps, tips: [seg(-1.0), seg(1.0), seg(1.0)], next: 0 })
    }

    fn pending(&self) -> Option<Pending> {
        let (t, e) = (self.t, self.eps);
        let (at, tip) = match self.next {
            0 => (1.0, 0),
            1 => (2.0 - 3.0 * t - e, 1),
            2 => (2.0 - 2.0 * t - e, 2),
            3 => (2.0 - t - e, 2),
            4 => (2.0 - e, 2),
            _ => return None,
        };
        Some(Pending { at, location: self.tips[tip], weight: 1.0 })
    }
}

impl Strategy for StarCounterexample {
    fn name(&self) -> &str {
        "star_counterexample"
    }

    fn start(&mut self) -> Option<Pending> {
        self.pending()
    }

    fn confirm(&mut self, view: &GameView<'_>, _next: &Pending) -> bool {
        self.next == 0 || heading_to(view, &self.tips[0])
    }

    fn react(&mut self, view: &GameView<'_>) -> Option<Pending> {
        if !heading_to(view, &self.tips[0]) {
            return None;
        }
        self.next += 1;
        self.pending()
    }

    fn offline_serves_all(&self) -> bool {
        false
    }
}

/// Space each registered adversary plays on.
pub fn space_for(name: &str) -> MetricSpace {
    match name {
        "star_counterexample" => MetricSpace::star(3).expect("three branches"),
        _ => MetricSpace::segment(),
    }
}

/// Request count fixed by a construction, if any.
pub fn fixed_n(name: &str) -> Option<usize> {
    match name {
        "n3_golden" => Some(3),
        "n4_medium" => Some(4),
        "star_counterexample" => Some(5),
        _ => None,
    }
}

/// Builds a registered adversary for `n` requests and delay `t`.
pub fn adversary_by_name(name: &str, n: usize, t: f64, eps: Option<f64>) -> Result<Box<dyn Adversary>> {
    if let Some(k) = fixed_n(name) {
        if n != k {
            return Err(precondition(format!("{name} is defined for n = {k}, got n = {n}")));
        }
    }
    Ok(match name {
        "no_delay" => {
            if t != 0.0 {
                return Err(precondition(format!("no_delay needs T = 0, got T = {t}")));
            }
            Box::new(Driver::new(NoDelay::new(n)?))
        }
        "small_delay_perf" => Box::new(Driver::new(SmallDelayPerf::new(n, t)?)),
        "small_delay_cr" => Box::new(Driver::new(SmallDelayCr::new(n, t, eps)?)),
        "large_delay" => Box::new(Driver::new(LargeDelay::new(n, t, eps)?)),
        "n3_golden" => Box::new(Driver::new(N3Golden::new(t, eps)?)),
        "n4_medium" => Box::new(Driver::new(N4Medium::new(t)?)),
        "star_counterexample" => Box::new(Driver::new(StarCounterexample::new(t, eps)?)),
        other => return Err(Error::Unknown(String::from(other))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perf_schedule_known_times() {
        let s = SmallDelayPerf::schedule(5, 0.1);
        let want = [1.0, 1.1625, 1.6125, 1.8375, 1.9375];
        for (a, b) in s.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!(s.windows(2).all(|w| w[1] - w[0] >= 0.1 - 1e-12));
    }

    #[test]
    fn preconditions() {
        assert!(SmallDelayPerf::new(5, 0.25).is_err());
        assert!(SmallDelayPerf::new(5, 0.6).is_err());
        assert!(SmallDelayCr::new(4, 0.2, None).is_err());
        assert!(LargeDelay::new(4, 0.9, None).is_err());
        assert!(N3Golden::new(0.4, None).is_err());
        assert!(N4Medium::new(0.5).is_err());
        assert!(StarCounterexample::new(0.25, None).is_err());
        assert!(adversary_by_name("n3_golden", 4, 0.6, None).is_err());
        assert!(adversary_by_name("no_delay", 4, 0.1, None).is_err());
        assert!(matches!(adversary_by_name("nope", 4, 0.1, None), Err(Error::Unknown(_))));
    }

    #[test]
    fn medium_weights() {
        let d2 = N4Medium::delta2();
        assert!((2.0 * d2 * d2 * d2 - 3.0 * d2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_delay_eta_offsets() {
        let a = LargeDelay::new(4, 1.0, None).unwrap();
        assert_eq!(a.i0(), 1);
        assert!((a.nominal_time(3) - 3.875).abs() < 1e-12);
        assert!((a.nominal_time(4) - 5.625).abs() < 1e-12);
    }
}
