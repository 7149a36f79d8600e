//! Online policies. Each one maps a decision instant to a heading.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{precondition, Error, Result};
use crate::game::{best_two_serve, EventKind, GameView, Policy, Request};
use crate::metric::{Point, SpaceKind};
use crate::numerics;

/// Names accepted by [`policy_by_name`].
pub const POLICY_NAMES: [&str; 6] = ["gr0", "gr1", "al1", "al2", "al3", "idle"];

/// Constants shared by the threshold policies.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParams {
    pub n: usize,
    pub delay: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// `ω_1..ω_n` with `ω_1 = 1`.
    pub omega: Vec<f64>,
    /// `α_{n - i0}`, the switching threshold of the large-delay greedy.
    pub threshold_alpha: f64,
    pub i0: usize,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
}

/// `κ = (1 + nε) / (1 - n(n-1)ε)`.
pub fn kappa(n: usize, eps: f64) -> f64 {
    let nf = n as f64;
    (1.0 + nf * eps) / (1.0 - nf * (nf - 1.0) * eps)
}

/// `ω_1 = 1`, `ω_{i+1} = ω_i (1 - n²ε) - (i-1)(κ - ω_i)`.
pub fn omega(n: usize, eps: f64) -> Vec<f64> {
    let nf = n as f64;
    let k = kappa(n, eps);
    let mut w = Vec::with_capacity(n);
    w.push(1.0);
    for i in 1..n {
        let prev = w[i - 1];
        w.push(prev * (1.0 - nf * nf * eps) - (i as f64 - 1.0) * (k - prev));
    }
    w
}

fn omega_ok(n: usize, eps: f64) -> bool {
    let nf = n as f64;
    let w = omega(n, eps);
    let last = w[n - 1];
    eps < 1.0 / (nf * nf) && last > 0.0 && last / ((nf - 1.0) * kappa(n, eps)) > 1.0 / nf + eps
}

/// Default ε for the guarded alternating policy: the largest
/// `1/(n(n-1)(n+3)) / 2^k` keeping `ω` positive with enough margin.
pub fn al3_default_epsilon(n: usize) -> f64 {
    let nf = n as f64;
    let mut eps = 1.0 / (nf * (nf - 1.0) * (nf + 3.0));
    for _ in 0..200 {
        if omega_ok(n, eps) {
            break;
        }
        eps /= 2.0;
    }
    eps
}

impl PolicyParams {
    /// `eps = None` uses `1/(n(n-1)(n+3))`.
    pub fn new(n: usize, delay: f64, eps: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(precondition("n must be at least 1"));
        }
        if !(delay >= 0.0) {
            return Err(precondition("delay must be non-negative"));
        }
        let nf = n as f64;
        let epsilon = match eps {
            Some(e) if e > 0.0 => e,
            Some(_) => return Err(precondition("epsilon must be positive")),
            None if n >= 2 => 1.0 / (nf * (nf - 1.0) * (nf + 3.0)),
            None => 0.0,
        };
        let i0 = if delay < 2.0 { numerics::i0(delay)? } else { n };
        let depth = n.saturating_sub(i0).max(1);
        let threshold_alpha = numerics::alpha(depth)?.alpha;
        let th = numerics::thresholds(n).ok();
        Ok(Self {
            n,
            delay,
            epsilon,
            kappa: kappa(n, epsilon),
            omega: omega(n, epsilon),
            threshold_alpha,
            i0,
            t0: th.map(|t| t.t0),
            t1: th.map(|t| t.t1),
        })
    }

    pub fn with_epsilon(&self, eps: f64) -> Self {
        let mut p = self.clone();
        p.epsilon = eps;
        p.kappa = kappa(self.n, eps);
        p.omega = omega(self.n, eps);
        p
    }
}

/// A heading candidate: a single request, or a pair served in order, in
/// which case the heading is the first one.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    target: Point,
    weight: f64,
    id: usize,
}

fn same_weight(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Largest weight; ties keep the current heading, then prefer the nearest,
/// then the lowest id.
fn pick(view: &GameView<'_>, cands: &[Candidate]) -> Option<Point> {
    let tol = view.tol();
    let space = view.space();
    let w = cands.iter().map(|c| c.weight).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<&Candidate> = cands.iter().filter(|c| same_weight(c.weight, w, tol)).collect();
    let cur = view.vehicle.target;
    let moving = space.dist(&cur, &view.vehicle.position) > tol;
    if moving {
        if let Some(c) = top.iter().find(|c| space.dist(&c.target, &cur) <= tol) {
            return Some(c.target);
        }
    }
    top.iter()
        .min_by(|a, b| {
            let da = view.distance_to(&a.target);
            let db = view.distance_to(&b.target);
            let near = if (da - db).abs() <= tol { core::cmp::Ordering::Equal } else { da.total_cmp(&db) };
            near.then(a.id.cmp(&b.id))
        })
        .map(|c| c.target)
}

fn singles(view: &GameView<'_>) -> Vec<Candidate> {
    view.reachable().map(|r| Candidate { target: r.location, weight: r.weight, id: r.id }).collect()
}

fn greedy(view: &GameView<'_>) -> Point {
    pick(view, &singles(view)).unwrap_or(view.vehicle.position)
}

/// Greedy where the best jointly servable pair competes as one request.
fn greedy_bundled(view: &GameView<'_>) -> Point {
    let mut cands = singles(view);
    let open = view.open_list();
    if let Some(pair) = best_two_serve(&view.vehicle, &open, view.space(), view.tol()) {
        let first = &view.requests[pair.first].request;
        cands.push(Candidate { target: first.location, weight: pair.weight, id: pair.first.min(pair.second) });
    }
    pick(view, &cands).unwrap_or(view.vehicle.position)
}

fn two_serve_possible(view: &GameView<'_>) -> bool {
    best_two_serve(&view.vehicle, &view.open_list(), view.space(), view.tol()).is_some()
}

fn request<'a>(view: &GameView<'a>, id: usize) -> &'a Request {
    &view.requests[id].request
}

fn still_open(view: &GameView<'_>, id: usize) -> bool {
    view.reachable().any(|r| r.id == id)
}

/// Always heads to the heaviest reachable request.
#[derive(Clone, Debug, Default)]
pub struct Gr0;

impl Policy for Gr0 {
    fn name(&self) -> &str {
        "gr0"
    }

    fn decide(&mut self, view: &GameView<'_>) -> Point {
        greedy(view)
    }
}

/// Never moves.
#[derive(Clone, Debug, Default)]
pub struct Idle;

impl Policy for Idle {
    fn name(&self) -> &str {
        "idle"
    }

    fn decide(&mut self, view: &GameView<'_>) -> Point {
        view.vehicle.position
    }
}

/// Large-delay greedy: returns to the origin when idle, and during a run of
/// competing releases keeps its target `f_i` only while
/// `δ_i / S_{i+1} >= α_{n-i0}` over the requests of the current phase.
#[derive(Clone, Debug)]
pub struct Gr1 {
    alpha: f64,
    pursuing: Option<usize>,
    phase: Vec<usize>,
}

impl Gr1 {
    pub fn new(params: &PolicyParams) -> Self {
        Self { alpha: params.threshold_alpha, pursuing: None, phase: Vec::new() }
    }
}

impl Policy for Gr1 {
    fn name(&self) -> &str {
        "gr1"
    }

    fn decide(&mut self, view: &GameView<'_>) -> Point {
        let reach: Vec<&Request> = view.reachable().collect();
        if reach.is_empty() {
            self.pursuing = None;
            self.phase.clear();
            return view.space().origin();
        }
        let cur = self.pursuing.filter(|id| reach.iter().any(|r| r.id == *id));
        if let (EventKind::RequestReleased(new), Some(c)) = (view.event, cur) {
            if new != c && reach.iter().any(|r| r.id == new) {
                if self.phase.is_empty() {
                    self.phase.push(c);
                }
                self.phase.push(new);
                let s: f64 = self.phase.iter().map(|&i| request(view, i).weight).sum();
                let keep = request(view, c).weight / s >= self.alpha - view.tol();
                let next = if keep { c } else { new };
                self.pursuing = Some(next);
                return request(view, next).location;
            }
        }
        if let Some(c) = cur {
            return request(view, c).location;
        }
        self.phase.clear();
        let target = if reach.len() == 1 { reach[0].location } else { greedy(view) };
        self.pursuing = reach.iter().find(|r| view.space().dist(&r.location, &target) <= view.tol()).map(|r| r.id);
        target
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Pursue,
    Greedy,
    Bundled,
}

/// Performance policy for the delay `T0`: commits to the first request
/// unless a much heavier request (relative weight above κ) or a chance to
/// serve two requests shows up, then turns greedy.
#[derive(Clone, Debug)]
pub struct Al1 {
    kappa: f64,
    first: Option<usize>,
    mode: Mode,
}

impl Al1 {
    pub fn new(params: &PolicyParams) -> Result<Self> {
        if params.n < 2 {
            return Err(precondition("al1 needs n >= 2"));
        }
        Ok(Self { kappa: params.kappa, first: None, mode: Mode::Pursue })
    }
}

impl Policy for Al1 {
    fn name(&self) -> &str {
        "al1"
    }

    fn decide(&mut self, view: &GameView<'_>) -> Point {
        if self.mode == Mode::Pursue {
            let Some(f1) = self.first.or_else(|| view.requests.first().map(|s| s.request.id)) else {
                return view.vehicle.position;
            };
            self.first = Some(f1);
            let base = request(view, f1).weight;
            if view.requests.iter().any(|s| s.request.weight / base > self.kappa) {
                self.mode = Mode::Greedy;
            } else if two_serve_possible(view) {
                self.mode = Mode::Bundled;
            } else if still_open(view, f1) {
                return request(view, f1).location;
            } else {
                self.mode = Mode::Greedy;
            }
        }
        match self.mode {
            Mode::Bundled => greedy_bundled(view),
            _ => greedy(view),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AltMode {
    Alternating,
    Keep,
    Greedy,
    Bundled,
}

/// Competitive policy for the delay `T1` on the segment. It follows requests
/// that alternate between the two ends, switching to the new end only when
/// the release comes early enough relative to the current ETA τ:
/// it keeps course when `t_i > τ_{i-1} - 2^{n-1-i} T1`.
///
/// With guards enabled, a relative weight outside `[ω_i, κ]` makes it greedy
/// and any chance to serve two requests makes it greedy on pairs.
#[derive(Clone, Debug)]
pub struct Alternating {
    n: usize,
    t1: f64,
    guards: Option<(f64, Vec<f64>)>,
    mode: AltMode,
    target: Option<usize>,
    tau: f64,
}

impl Alternating {
    pub fn al2(params: &PolicyParams) -> Result<Self> {
        let t1 = params.t1.ok_or_else(|| precondition("al2 needs n >= 3"))?;
        Ok(Self { n: params.n, t1, guards: None, mode: AltMode::Alternating, target: None, tau: 0.0 })
    }

    pub fn al3(params: &PolicyParams) -> Result<Self> {
        let mut p = Self::al2(params)?;
        p.guards = Some((params.kappa, params.omega.clone()));
        Ok(p)
    }

    fn opposite_end(view: &GameView<'_>, heading: &Point, p: &Point) -> bool {
        if view.space().kind() != SpaceKind::Segment {
            return false;
        }
        match (heading.as_segment(), p.as_segment()) {
            (Some(h), Some(x)) => {
                let tol = view.tol();
                (h.abs() - 1.0).abs() <= tol && (x + h).abs() <= tol
            }
            _ => false,
        }
    }

    fn keep_or_greedy(&mut self, view: &GameView<'_>) -> Point {
        match self.target {
            Some(t) if still_open(view, t) => request(view, t).location,
            _ => {
                self.mode = AltMode::Bundled;
                greedy_bundled(view)
            }
        }
    }
}

impl Policy for Alternating {
    fn name(&self) -> &str {
        if self.guards.is_some() {
            "al3"
        } else {
            "al2"
        }
    }

    fn decide(&mut self, view: &GameView<'_>) -> Point {
        if let Some((kappa, omega)) = &self.guards {
            if let EventKind::RequestReleased(id) = view.event {
                if let Some(first) = view.requests.first() {
                    let rel = request(view, id).weight / first.request.weight;
                    let w = omega.get(id).copied().unwrap_or(f64::NEG_INFINITY);
                    if matches!(self.mode, AltMode::Alternating | AltMode::Keep) && (rel > *kappa || rel < w) {
                        self.mode = AltMode::Greedy;
                    }
                }
            }
            if matches!(self.mode, AltMode::Alternating | AltMode::Keep) && two_serve_possible(view) {
                self.mode = AltMode::Bundled;
            }
        }
        match self.mode {
            AltMode::Greedy => return greedy(view),
            AltMode::Bundled => return greedy_bundled(view),
            AltMode::Keep => {
                if two_serve_possible(view) {
                    self.mode = AltMode::Bundled;
                    return greedy_bundled(view);
                }
                return self.keep_or_greedy(view);
            }
            AltMode::Alternating => {}
        }
        let EventKind::RequestReleased(id) = view.event else {
            if self.target.is_none() {
                return view.vehicle.position;
            }
            return self.keep_or_greedy(view);
        };
        let r = request(view, id);
        let Some(cur) = self.target.filter(|&t| still_open(view, t)) else {
            if self.target.is_some() {
                return self.keep_or_greedy(view);
            }
            // first release: head there
            self.target = Some(id);
            self.tau = view.vehicle.eta(view.space(), &r.location);
            return r.location;
        };
        let heading = request(view, cur).location;
        if !Self::opposite_end(view, &heading, &r.location) {
            return heading;
        }
        let i = id as i32 + 1;
        let threshold = self.tau - Float::powi(2.0, self.n as i32 - 1 - i) * self.t1;
        if r.release > threshold {
            self.mode = AltMode::Keep;
            if two_serve_possible(view) {
                self.mode = AltMode::Bundled;
                return greedy_bundled(view);
            }
            return heading;
        }
        self.target = Some(id);
        self.tau = view.vehicle.eta(view.space(), &r.location);
        r.location
    }
}

/// Plays a fixed keep/switch script: at the k-th release after the first,
/// `script[k]` says whether to head to the new request. Between releases it
/// keeps its target while that is reachable and otherwise acts greedily.
#[derive(Clone, Debug)]
pub struct Scripted {
    script: Vec<bool>,
    used: usize,
    target: Option<usize>,
}

impl Scripted {
    pub fn new(script: Vec<bool>) -> Self {
        Self { script, used: 0, target: None }
    }

    /// All `2^depth` scripts.
    pub fn all(depth: usize) -> Vec<Vec<bool>> {
        (0..1usize << depth).map(|m| (0..depth).map(|k| m >> k & 1 == 1).collect()).collect()
    }
}

impl Policy for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn decide(&mut self, view: &GameView<'_>) -> Point {
        if let EventKind::RequestReleased(id) = view.event {
            if self.target.is_none() {
                self.target = Some(id);
            } else {
                let switch = self.script.get(self.used).copied().unwrap_or(false);
                self.used += 1;
                if switch {
                    self.target = Some(id);
                }
            }
        }
        match self.target {
            Some(t) if still_open(view, t) => request(view, t).location,
            _ => {
                let p = greedy(view);
                self.target = view.reachable().find(|r| view.space().dist(&r.location, &p) <= view.tol()).map(|r| r.id);
                p
            }
        }
    }
}

/// Builds a registered policy. `al3` uses its own default ε unless
/// `eps_override` is set.
pub fn policy_by_name(name: &str, params: &PolicyParams, eps_override: Option<f64>) -> Result<Box<dyn Policy>> {
    Ok(match name {
        "gr0" => Box::new(Gr0),
        "idle" => Box::new(Idle),
        "gr1" => Box::new(Gr1::new(params)),
        "al1" => Box::new(Al1::new(params)?),
        "al2" => Box::new(Alternating::al2(params)?),
        "al3" => {
            let eps = eps_override.unwrap_or_else(|| al3_default_epsilon(params.n));
            if !omega_ok(params.n, eps) {
                return Err(precondition(format!(
                    "al3 epsilon {eps} is too large for n = {} (needs ε < 1/n² and ω_n large enough)",
                    params.n
                )));
            }
            Box::new(Alternating::al3(&params.with_epsilon(eps))?)
        }
        other => return Err(Error::Unknown(String::from(other))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{run_instance, Instance, RequestSpec};
    use crate::metric::MetricSpace;

    fn inst(delay: f64, reqs: &[(f64, f64, f64)]) -> Instance {
        Instance::new(
            MetricSpace::segment(),
            delay,
            reqs.iter()
                .map(|&(x, r, w)| RequestSpec { location: Point::Segment(x), release: r, weight: w })
                .collect(),
        )
    }

    #[test]
    fn gr0_prefers_heavier() {
        let t = run_instance(&inst(0.0, &[(-1.0, 1.0, 1.0), (1.0, 1.0, 2.0)]), &mut Gr0).unwrap();
        let at_second = t.events.iter().find(|e| e.kind == EventKind::RequestReleased(1)).unwrap();
        assert_eq!(at_second.target, Point::Segment(1.0));
    }

    #[test]
    fn gr0_keeps_on_tie() {
        let t = run_instance(&inst(0.0, &[(-1.0, 1.0, 1.0), (1.0, 1.2, 1.0)]), &mut Gr0).unwrap();
        let at_second = t.events.iter().find(|e| e.kind == EventKind::RequestReleased(1)).unwrap();
        assert_eq!(at_second.target, Point::Segment(-1.0));
    }

    #[test]
    fn gr0_switches_to_heavier_newcomer() {
        let t = run_instance(&inst(0.0, &[(-1.0, 1.0, 2.0), (1.0, 1.2, 3.0)]), &mut Gr0).unwrap();
        let at_second = t.events.iter().find(|e| e.kind == EventKind::RequestReleased(1)).unwrap();
        assert_eq!(at_second.target, Point::Segment(1.0));
    }

    #[test]
    fn gr1_threshold() {
        let p = PolicyParams::new(3, 1.0, None).unwrap();
        assert!((p.threshold_alpha - 0.5).abs() < 1e-12);
        // 1/(1+1) >= 1/2 keeps f1, 1/(1+3) < 1/2 switches
        assert_eq!(gr1_second_heading(&p, 1.0), Point::Segment(-1.0));
        assert_eq!(gr1_second_heading(&p, 3.0), Point::Segment(1.0));
    }

    /// Pursuing f1 = (-1, [1,3], 1) from 0.5 away when f2 appears at +1.
    fn gr1_second_heading(p: &PolicyParams, w2: f64) -> Point {
        use crate::game::{GameConfig, GameView, RequestStatus, VehicleState};
        let config = GameConfig::new(3, 1.0, MetricSpace::segment());
        let mk = |id, x: f64, r: f64, w| RequestStatus {
            request: Request { id, location: Point::Segment(x), release: r, deadline: r + 2.0, weight: w },
            served_at: None,
        };
        let reqs = [mk(0, -1.0, 1.0, 1.0), mk(1, 1.0, 2.0, w2)];
        let mut g = Gr1::new(p);
        let v0 = GameView {
            config: &config,
            vehicle: VehicleState { time: 1.0, position: Point::Segment(0.0), target: Point::Segment(0.0) },
            event: EventKind::RequestReleased(0),
            requests: &reqs[..1],
        };
        assert_eq!(g.decide(&v0), Point::Segment(-1.0));
        let v1 = GameView {
            config: &config,
            vehicle: VehicleState { time: 2.0, position: Point::Segment(-0.5), target: Point::Segment(-1.0) },
            event: EventKind::RequestReleased(1),
            requests: &reqs,
        };
        g.decide(&v1)
    }

    #[test]
    fn gr1_returns_to_origin() {
        let p = PolicyParams::new(3, 1.0, None).unwrap();
        let t = run_instance(&inst(1.0, &[(-1.0, 1.0, 1.0)]), &mut Gr1::new(&p)).unwrap();
        let reached = t.events.iter().find(|e| e.kind == EventKind::TargetReached).unwrap();
        assert_eq!(reached.target, Point::Segment(0.0));
    }

    #[test]
    fn al1_takeover_on_heavy_request() {
        let p = PolicyParams::new(5, 0.2, None).unwrap();
        let mut a = Al1::new(&p).unwrap();
        let t = run_instance(&inst(0.2, &[(-1.0, 1.0, 1.0), (1.0, 1.3, 10.0)]), &mut a).unwrap();
        assert_eq!(t.events.iter().find(|e| e.kind == EventKind::RequestReleased(1)).unwrap().target, Point::Segment(1.0));
    }

    #[test]
    fn al3_epsilon_default_is_valid() {
        for n in 3..=8 {
            let e = al3_default_epsilon(n);
            assert!(omega_ok(n, e), "n={n}");
            let w = omega(n, e);
            assert!(w.windows(2).all(|p| p[1] < p[0]));
            assert!(kappa(n, e) > 1.0);
        }
    }

    #[test]
    fn registry() {
        let p = PolicyParams::new(4, 0.2, None).unwrap();
        for name in POLICY_NAMES {
            assert_eq!(policy_by_name(name, &p, None).unwrap().name(), name);
        }
        assert!(matches!(policy_by_name("nope", &p, None), Err(Error::Unknown(_))));
    }
}
