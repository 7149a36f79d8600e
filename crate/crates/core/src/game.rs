//! The continuous-time online game.
//!
//! The engine only stops at decision instants (releases, arrivals, window
//! closings). Between two of them the vehicle follows a frozen heading at unit
//! speed, so a whole run is a finite list of events. Requests are served
//! whenever the vehicle's path crosses their location inside the window, not
//! only when they are the current target.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, protocol, Error, Result};
use crate::metric::{MetricSpace, Point};
use crate::DEFAULT_TOL;

/// Length of every time window; equals the diameter of the space.
pub const WINDOW: f64 = 2.0;

const MAX_EVENTS: usize = 1_000_000;

/// A request as written in an instance: the deadline is `release + 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RequestSpec {
    pub location: Point,
    pub release: f64,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Request {
    pub id: usize,
    pub location: Point,
    pub release: f64,
    pub deadline: f64,
    pub weight: f64,
}

impl Request {
    pub fn from_spec(id: usize, spec: &RequestSpec) -> Self {
        Self {
            id,
            location: spec.location,
            release: spec.release,
            deadline: spec.release + WINDOW,
            weight: spec.weight,
        }
    }

    pub fn spec(&self) -> RequestSpec {
        RequestSpec { location: self.location, release: self.release, weight: self.weight }
    }
}

/// A fixed offline instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub space: MetricSpace,
    pub delay: f64,
    pub requests: Vec<RequestSpec>,
}

impl Instance {
    pub fn new(space: MetricSpace, delay: f64, requests: Vec<RequestSpec>) -> Self {
        Self { space, delay, requests }
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.requests.iter().map(|r| r.weight).fold(0.0, |a, w| a + w)
    }

    pub fn requests(&self) -> Vec<Request> {
        self.requests.iter().enumerate().map(|(i, s)| Request::from_spec(i, s)).collect()
    }

    /// Checks locations, weights, release order and the delay constraint.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if !(self.delay >= 0.0) {
            return Err(invalid("delay must be non-negative"));
        }
        let mut prev: Option<f64> = None;
        for (i, r) in self.requests.iter().enumerate() {
            self.space
                .validate(&r.location)
                .map_err(|_| invalid(format!("requests[{i}].loc: {} is outside the space", r.location)))?;
            if !(r.weight > 0.0) || !r.weight.is_finite() {
                return Err(invalid(format!("requests[{i}].weight must be positive")));
            }
            if !(r.release >= 0.0) || !r.release.is_finite() {
                return Err(invalid(format!("requests[{i}].release must be a non-negative time")));
            }
            if let Some(p) = prev {
                if r.release < p - tol {
                    return Err(invalid(format!("requests[{i}].release is earlier than its predecessor")));
                }
                if r.release - p < self.delay - tol {
                    return Err(invalid(format!(
                        "requests[{i}].release is {} after the previous release, delay is {}",
                        r.release - p,
                        self.delay
                    )));
                }
            }
            prev = Some(r.release);
        }
        Ok(())
    }
}

/// Multiplies every weight by `c > 0`.
pub fn scale_weights(instance: &Instance, c: f64) -> Result<Instance> {
    if !(c > 0.0) {
        return Err(invalid("scale factor must be positive"));
    }
    let mut out = instance.clone();
    for r in &mut out.requests {
        r.weight *= c;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameConfig {
    pub n_max: usize,
    pub delay: f64,
    pub space: MetricSpace,
    pub start: Point,
    pub tol: f64,
}

impl GameConfig {
    pub fn new(n_max: usize, delay: f64, space: MetricSpace) -> Self {
        Self { n_max, delay, space, start: space.origin(), tol: DEFAULT_TOL }
    }

    pub fn for_instance(instance: &Instance) -> Self {
        Self::new(instance.len().max(1), instance.delay, instance.space)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(invalid("n_max must be at least 1"));
        }
        if !(self.delay >= 0.0) {
            return Err(invalid("delay must be non-negative"));
        }
        if !(self.tol >= 0.0) {
            return Err(invalid("tolerance must be non-negative"));
        }
        self.space.validate(&self.start)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleState {
    pub time: f64,
    pub position: Point,
    /// Current heading; equal to `position` while waiting.
    pub target: Point,
}

impl VehicleState {
    /// Earliest arrival time at `p` when leaving now.
    pub fn eta(&self, space: &MetricSpace, p: &Point) -> f64 {
        self.time + space.dist(&self.position, p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind {
    Start,
    RequestReleased(usize),
    TargetReached,
    WindowClosed(usize),
    GameEnd,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::Start => "start",
            EventKind::RequestReleased(_) => "release",
            EventKind::TargetReached => "reached",
            EventKind::WindowClosed(_) => "closed",
            EventKind::GameEnd => "end",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: EventKind,
    pub position: Point,
    /// Heading chosen by the policy at this event.
    pub target: Point,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RequestStatus {
    pub request: Request,
    pub served_at: Option<f64>,
}

/// What policies and adversaries see at a decision instant.
pub struct GameView<'a> {
    pub config: &'a GameConfig,
    pub vehicle: VehicleState,
    pub event: EventKind,
    pub requests: &'a [RequestStatus],
}

impl<'a> GameView<'a> {
    pub fn time(&self) -> f64 {
        self.vehicle.time
    }

    pub fn space(&self) -> &MetricSpace {
        &self.config.space
    }

    pub fn tol(&self) -> f64 {
        self.config.tol
    }

    pub fn released(&self) -> usize {
        self.requests.len()
    }

    pub fn is_served(&self, id: usize) -> bool {
        self.requests.get(id).is_some_and(|s| s.served_at.is_some())
    }

    pub fn distance_to(&self, p: &Point) -> f64 {
        self.config.space.dist(&self.vehicle.position, p)
    }

    /// Unserved requests whose window has not closed yet.
    pub fn open(&self) -> impl Iterator<Item = &'a Request> + '_ {
        let now = self.vehicle.time;
        let tol = self.config.tol;
        self.requests
            .iter()
            .filter(move |s| s.served_at.is_none() && now <= s.request.deadline + tol)
            .map(|s| &s.request)
    }

    /// Open requests the vehicle can still reach before their deadline.
    pub fn reachable(&self) -> impl Iterator<Item = &'a Request> + '_ {
        self.open().filter(move |r| self.can_reach(r))
    }

    pub fn can_reach(&self, r: &Request) -> bool {
        r.served_at_ok(self.vehicle.eta(&self.config.space, &r.location), self.config.tol)
    }

    pub fn open_list(&self) -> Vec<Request> {
        self.open().copied().collect()
    }

    /// Whether the current heading is the location of `r`.
    pub fn heading_to(&self, r: &Request) -> bool {
        self.config.space.dist(&self.vehicle.target, &r.location) <= self.config.tol
    }
}

impl Request {
    pub(crate) fn served_at_ok(&self, arrival: f64, tol: f64) -> bool {
        arrival <= self.deadline + tol
    }
}

/// A planned route through two open requests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoServe {
    pub first: usize,
    pub second: usize,
    pub weight: f64,
}

/// Whether, leaving now at unit speed, some ordered pair of distinct open
/// requests can both be served. Waiting for a release is allowed.
pub fn can_serve_two(
    state: &VehicleState,
    open_requests: &[Request],
    space: &MetricSpace,
    tol: f64,
) -> bool {
    best_two_serve(state, open_requests, space, tol).is_some()
}

/// The feasible ordered pair with the largest combined weight; ties keep the
/// earliest pair found in id order.
pub fn best_two_serve(
    state: &VehicleState,
    open_requests: &[Request],
    space: &MetricSpace,
    tol: f64,
) -> Option<TwoServe> {
    let mut best: Option<TwoServe> = None;
    for a in open_requests {
        let arr_a = state.eta(space, &a.location).max(a.release);
        if arr_a > a.deadline + tol {
            continue;
        }
        for b in open_requests {
            if a.id == b.id {
                continue;
            }
            let arr_b = (arr_a + space.dist(&a.location, &b.location)).max(b.release);
            if arr_b > b.deadline + tol {
                continue;
            }
            let w = a.weight + b.weight;
            if best.is_none_or(|p| w > p.weight) {
                best = Some(TwoServe { first: a.id, second: b.id, weight: w });
            }
        }
    }
    best
}

/// An online algorithm. `decide` returns the new heading; returning the
/// current position means waiting.
pub trait Policy {
    fn name(&self) -> &str;
    fn decide(&mut self, view: &GameView<'_>) -> Point;
}

impl<P: Policy + ?Sized> Policy for alloc::boxed::Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn decide(&mut self, view: &GameView<'_>) -> Point {
        (**self).decide(view)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trigger {
    /// Before anything happens, at time 0.
    Start,
    /// At the time the adversary asked to be woken.
    Wake,
    /// Right after the policy picked a heading at some event.
    Observe,
}

/// A release made right now.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Release {
    pub location: Point,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Plan {
    pub release: Option<Release>,
    /// Next time the adversary wants to act. `None` keeps nothing scheduled.
    pub wake_at: Option<f64>,
}

impl Plan {
    pub fn idle() -> Self {
        Self::default()
    }

    pub fn wake(at: f64) -> Self {
        Self { release: None, wake_at: Some(at) }
    }

    pub fn release(location: Point, weight: f64) -> Self {
        Self { release: Some(Release { location, weight }), wake_at: None }
    }

    pub fn then_wake(mut self, at: Option<f64>) -> Self {
        self.wake_at = at;
        self
    }
}

/// The instance-building side of the game. Adaptive adversaries watch the
/// vehicle's heading after every decision and schedule releases.
pub trait Adversary {
    fn name(&self) -> &str;
    fn plan(&mut self, trigger: Trigger, view: &GameView<'_>) -> Result<Plan>;
    /// Whether the construction promises that the offline optimum serves
    /// every released request.
    fn offline_serves_all(&self) -> bool {
        false
    }
}

impl<A: Adversary + ?Sized> Adversary for alloc::boxed::Box<A> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn plan(&mut self, trigger: Trigger, view: &GameView<'_>) -> Result<Plan> {
        (**self).plan(trigger, view)
    }
    fn offline_serves_all(&self) -> bool {
        (**self).offline_serves_all()
    }
}

/// Replays a fixed instance as a non-adaptive opponent.
#[derive(Clone, Debug)]
pub struct FixedInstance {
    requests: Vec<RequestSpec>,
    next: usize,
}

impl FixedInstance {
    pub fn new(instance: &Instance) -> Self {
        Self { requests: instance.requests.clone(), next: 0 }
    }

    fn pending(&self) -> Option<f64> {
        self.requests.get(self.next).map(|r| r.release)
    }
}

impl Adversary for FixedInstance {
    fn name(&self) -> &str {
        "fixed"
    }

    fn plan(&mut self, trigger: Trigger, view: &GameView<'_>) -> Result<Plan> {
        if let (Trigger::Wake, Some(r)) = (trigger, self.requests.get(self.next)) {
            if r.release <= view.time() + view.tol() {
                self.next += 1;
                return Ok(Plan::release(r.location, r.weight).then_wake(self.pending()));
            }
        }
        Ok(Plan { release: None, wake_at: self.pending() })
    }
}

/// Everything that happened in one run.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTrace {
    pub config: GameConfig,
    pub events: Vec<TraceEvent>,
    pub requests: Vec<Request>,
    /// `(request id, serve time)` in serve order.
    pub served: Vec<(usize, f64)>,
}

impl GameTrace {
    pub fn released_weight(&self) -> f64 {
        self.requests.iter().map(|r| r.weight).fold(0.0, |a, w| a + w)
    }

    pub fn served_weight(&self) -> f64 {
        self.served.iter().map(|&(id, _)| self.requests[id].weight).fold(0.0, |a, w| a + w)
    }

    pub fn is_served(&self, id: usize) -> bool {
        self.served.iter().any(|&(i, _)| i == id)
    }

    /// The released requests as an instance with this game's delay.
    pub fn instance(&self) -> Instance {
        Instance::new(
            self.config.space,
            self.config.delay,
            self.requests.iter().map(Request::spec).collect(),
        )
    }

    /// Headings chosen at each event, in order.
    pub fn headings(&self) -> Vec<Point> {
        self.events.iter().map(|e| e.target).collect()
    }

    /// Vehicle position at time `t`, rebuilt from the heading history.
    pub fn position_at(&self, t: f64) -> Point {
        let space = &self.config.space;
        let mut last = match self.events.first() {
            Some(e) => e,
            None => return self.config.start,
        };
        for e in &self.events[1..] {
            if e.time > t {
                break;
            }
            last = e;
        }
        space.step(&last.position, &last.target, (t - last.time).max(0.0))
    }

    /// Checks the trace invariants: release spacing and count, non-decreasing
    /// event times, the unit speed bound, and that every serve happened inside
    /// its window with the vehicle on the location.
    pub fn verify(&self) -> Result<()> {
        let tol = self.config.tol;
        let space = &self.config.space;
        if self.requests.len() > self.config.n_max {
            return Err(protocol("more releases than n_max"));
        }
        for w in self.requests.windows(2) {
            if w[1].release - w[0].release < self.config.delay - tol {
                return Err(protocol(format!(
                    "releases {} and {} are {} apart, delay is {}",
                    w[0].id,
                    w[1].id,
                    w[1].release - w[0].release,
                    self.config.delay
                )));
            }
        }
        for w in self.events.windows(2) {
            let dt = w[1].time - w[0].time;
            if dt < -tol {
                return Err(protocol("event times decrease"));
            }
            // each event may snap the position by up to tol
            if space.dist(&w[0].position, &w[1].position) > dt + 2.0 * tol {
                return Err(protocol(format!("speed bound violated at t={}", w[1].time)));
            }
        }
        for &(id, s) in &self.served {
            let r = &self.requests[id];
            if s < r.release - tol || s > r.deadline + tol {
                return Err(protocol(format!("request {id} served outside its window")));
            }
            let p = self.position_at(s);
            if space.dist(&p, &r.location) > 4.0 * tol {
                return Err(protocol(format!("request {id} served away from its location")));
            }
        }
        Ok(())
    }
}

/// Served weight over released weight; 1 for an empty game.
pub fn performance(trace: &GameTrace) -> f64 {
    let total = trace.released_weight();
    if total == 0.0 {
        1.0
    } else {
        trace.served_weight() / total
    }
}

/// Served weight over the offline optimum of the released instance.
pub fn competitive_ratio(trace: &GameTrace, offline_value: f64) -> Result<f64> {
    if trace.requests.is_empty() {
        return Ok(1.0);
    }
    if !(offline_value > 0.0) {
        return Err(Error::DegenerateInstance);
    }
    let ratio = trace.served_weight() / offline_value;
    if ratio > 1.0 + trace.config.tol {
        return Err(protocol(format!("online value exceeds offline value (ratio {ratio})")));
    }
    Ok(ratio)
}

struct Engine<'c> {
    config: &'c GameConfig,
    vehicle: VehicleState,
    requests: Vec<RequestStatus>,
    closed: Vec<bool>,
    events: Vec<TraceEvent>,
    served: Vec<(usize, f64)>,
    wake: Option<f64>,
}

impl<'c> Engine<'c> {
    fn view(&self, event: EventKind) -> GameView<'_> {
        GameView { config: self.config, vehicle: self.vehicle, event, requests: &self.requests }
    }

    fn mark_served(&mut self, id: usize, at: f64) {
        if self.requests[id].served_at.is_none() {
            self.requests[id].served_at = Some(at);
            self.served.push((id, at));
        }
    }

    /// Moves the vehicle to time `t`, serving every open request it passes.
    fn advance(&mut self, t: f64) {
        let dt = (t - self.vehicle.time).max(0.0);
        let space = self.config.space;
        let tol = self.config.tol;
        let from = self.vehicle.position;
        let to = self.vehicle.target;
        let reach = space.dist(&from, &to);
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for s in &self.requests {
            if s.served_at.is_some() {
                continue;
            }
            let r = &s.request;
            let along = space.dist(&from, &r.location);
            if along > dt.min(reach) + tol {
                continue;
            }
            let at = self.vehicle.time + along.min(reach);
            if at > r.deadline + tol || at < r.release - tol {
                continue;
            }
            if space.on_path(&from, &to, &r.location, tol) {
                hits.push((at, r.id));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (at, id) in hits {
            self.mark_served(id, at);
        }
        self.vehicle.position = space.step(&from, &to, dt);
        self.vehicle.time = t;
    }

    fn record(&mut self, kind: EventKind) -> Result<()> {
        if self.events.len() >= MAX_EVENTS {
            return Err(protocol("event limit exceeded"));
        }
        self.events.push(TraceEvent {
            time: self.vehicle.time,
            kind,
            position: self.vehicle.position,
            target: self.vehicle.target,
        });
        Ok(())
    }

    /// Policy decision followed by adversary observation, repeated while the
    /// adversary keeps releasing at this instant.
    fn decide<P: Policy + ?Sized, A: Adversary + ?Sized>(
        &mut self,
        kind: EventKind,
        policy: &mut P,
        adversary: &mut A,
    ) -> Result<()> {
        let mut kind = kind;
        loop {
            let target = policy.decide(&self.view(kind));
            self.config.space.validate(&target).map_err(|_| {
                protocol(format!("policy {} chose invalid target {target}", policy.name()))
            })?;
            self.vehicle.target = target;
            self.record(kind)?;
            let plan = adversary.plan(Trigger::Observe, &self.view(kind))?;
            match self.apply(plan)? {
                Some(id) => kind = EventKind::RequestReleased(id),
                None => return Ok(()),
            }
        }
    }

    fn apply(&mut self, plan: Plan) -> Result<Option<usize>> {
        if let Some(w) = plan.wake_at {
            if !w.is_finite() || w < self.vehicle.time - self.config.tol {
                return Err(protocol(format!("adversary asked to wake in the past ({w})")));
            }
        }
        self.wake = plan.wake_at.map(|w| w.max(self.vehicle.time));
        let Some(rel) = plan.release else { return Ok(None) };
        let now = self.vehicle.time;
        let tol = self.config.tol;
        if self.requests.len() >= self.config.n_max {
            return Err(protocol("adversary exceeded n_max releases"));
        }
        if let Some(last) = self.requests.last() {
            if now - last.request.release < self.config.delay - tol {
                return Err(protocol(format!(
                    "release at t={now} only {} after the previous one (delay {})",
                    now - last.request.release,
                    self.config.delay
                )));
            }
        }
        self.config
            .space
            .validate(&rel.location)
            .map_err(|_| protocol(format!("adversary released at invalid location {}", rel.location)))?;
        if !(rel.weight > 0.0) {
            return Err(protocol("adversary released a non-positive weight"));
        }
        let id = self.requests.len();
        let request = Request {
            id,
            location: rel.location,
            release: now,
            deadline: now + WINDOW,
            weight: rel.weight,
        };
        self.requests.push(RequestStatus { request, served_at: None });
        self.closed.push(false);
        if self.config.space.dist(&self.vehicle.position, &rel.location) <= tol {
            self.mark_served(id, now);
        }
        Ok(Some(id))
    }
}

/// Plays one game between `policy` and `opponent`.
pub fn run_game<P: Policy + ?Sized, A: Adversary + ?Sized>(
    config: &GameConfig,
    policy: &mut P,
    opponent: &mut A,
) -> Result<GameTrace> {
    config.validate()?;
    let tol = config.tol;
    let mut eng = Engine {
        config,
        vehicle: VehicleState { time: 0.0, position: config.start, target: config.start },
        requests: Vec::new(),
        closed: Vec::new(),
        events: Vec::new(),
        served: Vec::new(),
        wake: None,
    };

    let plan = opponent.plan(Trigger::Start, &eng.view(EventKind::Start))?;
    let first = eng.apply(plan)?;
    eng.decide(EventKind::Start, policy, opponent)?;
    if let Some(id) = first {
        eng.decide(EventKind::RequestReleased(id), policy, opponent)?;
    }

    loop {
        let now = eng.vehicle.time;
        let next_close = eng
            .requests
            .iter()
            .zip(&eng.closed)
            .filter(|(s, &c)| !c && s.served_at.is_none())
            .map(|(s, _)| s.request.deadline)
            .fold(f64::INFINITY, f64::min);
        if eng.wake.is_none() && next_close == f64::INFINITY {
            break;
        }
        let gap = config.space.dist(&eng.vehicle.position, &eng.vehicle.target);
        let next_reach = if gap > tol { now + gap } else { f64::INFINITY };
        let t_next = next_close.min(next_reach).min(eng.wake.unwrap_or(f64::INFINITY)).max(now);
        eng.advance(t_next);
        let reached = next_reach <= t_next + tol;
        if reached {
            eng.vehicle.position = eng.vehicle.target;
        }

        // Simultaneous events: closings, then the adversary, then arrival.
        for id in 0..eng.requests.len() {
            let s = eng.requests[id];
            if eng.closed[id] || s.request.deadline > t_next + tol {
                continue;
            }
            eng.closed[id] = true;
            if s.served_at.is_none() {
                eng.decide(EventKind::WindowClosed(id), policy, opponent)?;
            }
        }
        if eng.wake.is_some_and(|w| w <= t_next + tol) {
            eng.wake = None;
            let last = eng.events.last().map_or(EventKind::Start, |e| e.kind);
            let plan = opponent.plan(Trigger::Wake, &eng.view(last))?;
            if let Some(id) = eng.apply(plan)? {
                eng.decide(EventKind::RequestReleased(id), policy, opponent)?;
            }
        }
        if reached {
            eng.decide(EventKind::TargetReached, policy, opponent)?;
        }
    }
    eng.record(EventKind::GameEnd)?;

    Ok(GameTrace {
        config: *config,
        events: eng.events,
        requests: eng.requests.iter().map(|s| s.request).collect(),
        served: eng.served,
    })
}

/// Plays `policy` on a fixed instance.
pub fn run_instance<P: Policy + ?Sized>(instance: &Instance, policy: &mut P) -> Result<GameTrace> {
    instance.validate(DEFAULT_TOL)?;
    let config = GameConfig::for_instance(instance);
    run_game(&config, policy, &mut FixedInstance::new(instance))
}

/// Prefix sums `S_i` of a weight list.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixSums(Vec<f64>);

impl PrefixSums {
    pub fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        Self(weights.iter().map(|w| {
            acc += w;
            acc
        }).collect())
    }

    /// `S_i` with 1-based `i`; `S_0 = 0`.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.0[i - 1]
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}
