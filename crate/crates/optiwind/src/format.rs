//! JSON instance files and plain-text trace export.
//!
//! ```json
//! {
//!   "space": { "kind": "star", "branches": 3 },
//!   "delay": 0.2,
//!   "requests": [ { "loc": [0, 1.0], "release": 1.0, "weight": 1.0 } ]
//! }
//! ```
//!
//! Segment and circle locations are numbers; star locations are
//! `[branch, radius]`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use optiwind_core::game::{EventKind, GameTrace};
use optiwind_core::{performance, Instance, MetricSpace, Point, RequestSpec, SpaceKind, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::error::FormatError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceFile {
    Segment,
    Star { branches: usize },
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocFile {
    Scalar(f64),
    Star([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFile {
    pub loc: LocFile,
    pub release: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space: SpaceFile,
    #[serde(default)]
    pub delay: f64,
    pub requests: Vec<RequestFile>,
}

impl From<&MetricSpace> for SpaceFile {
    fn from(s: &MetricSpace) -> Self {
        match s.kind() {
            SpaceKind::Segment => SpaceFile::Segment,
            SpaceKind::Star { branches } => SpaceFile::Star { branches },
            SpaceKind::Circle => SpaceFile::Circle,
        }
    }
}

impl From<&Instance> for InstanceFile {
    fn from(i: &Instance) -> Self {
        let requests = i
            .requests
            .iter()
            .map(|r| RequestFile {
                loc: match r.location {
                    Point::Segment(x) | Point::Circle(x) => LocFile::Scalar(x),
                    Point::Star { branch, radius } => LocFile::Star([branch as f64, radius]),
                },
                release: r.release,
                weight: r.weight,
            })
            .collect();
        InstanceFile { space: SpaceFile::from(&i.space), delay: i.delay, requests }
    }
}

impl InstanceFile {
    /// Converts to a validated instance; errors name the offending field.
    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let space = match self.space {
            SpaceFile::Segment => MetricSpace::segment(),
            SpaceFile::Circle => MetricSpace::circle(),
            SpaceFile::Star { branches } => MetricSpace::star(branches)
                .map_err(|e| FormatError::field("space.branches", e.to_string()))?,
        };
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return Err(FormatError::field("delay", "must be a non-negative number"));
        }
        let mut requests = Vec::with_capacity(self.requests.len());
        for (i, r) in self.requests.iter().enumerate() {
            let field = format!("requests[{i}].loc");
            let location = match (&r.loc, space.kind()) {
                (LocFile::Scalar(x), SpaceKind::Segment) => Point::Segment(*x),
                (LocFile::Scalar(x), SpaceKind::Circle) => Point::Circle(*x),
                (LocFile::Star([b, radius]), SpaceKind::Star { .. }) => {
                    if !(b.fract() == 0.0 && *b >= 0.0) {
                        return Err(FormatError::field(field, "branch must be a non-negative integer"));
                    }
                    Point::star(*b as usize, *radius)
                }
                (LocFile::Scalar(_), SpaceKind::Star { .. }) => {
                    return Err(FormatError::field(field, "star locations are [branch, radius]"))
                }
                (LocFile::Star(_), _) => return Err(FormatError::field(field, "expected a number")),
            };
            if !space.contains(&location) {
                return Err(FormatError::field(field, format!("{location} is outside the space")));
            }
            requests.push(RequestSpec { location, release: r.release, weight: r.weight });
        }
        let instance = Instance::new(space, self.delay, requests);
        instance.validate(DEFAULT_TOL).map_err(|e| {
            let msg = e.to_string();
            let msg = msg.strip_prefix("invalid input: ").unwrap_or(&msg).to_string();
            match msg.split_once(' ') {
                Some((field, rest)) if field.starts_with("requests[") => {
                    FormatError::field(field.trim_end_matches(':'), rest.trim_start_matches(": "))
                }
                _ => FormatError::field("requests", msg),
            }
        })?;
        Ok(instance)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    serde_json::from_str::<InstanceFile>(text)?.to_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(instance)).expect("instance serializes")
}

pub fn read_instance(path: &Path) -> Result<Instance, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.into(), source })?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<(), FormatError> {
    fs::write(path, instance_to_json(instance) + "\n").map_err(|source| FormatError::Io { path: path.into(), source })
}

fn event_label(kind: &EventKind) -> String {
    match kind {
        EventKind::RequestReleased(id) | EventKind::WindowClosed(id) => format!("{}:{id}", kind.label()),
        _ => kind.label().to_string(),
    }
}

/// One `t=.. event=.. pos=.. target=..` line per event, then the summary.
pub fn trace_lines(trace: &GameTrace) -> String {
    let mut out = String::new();
    for e in &trace.events {
        let _ = writeln!(out, "t={} event={} pos={} target={}", e.time, event_label(&e.kind), e.position, e.target);
    }
    out.push_str(&trace_summary(trace));
    out
}

/// Served ids with times, and the weight totals.
pub fn trace_summary(trace: &GameTrace) -> String {
    let served: Vec<String> = trace.served.iter().map(|(id, t)| format!("{id}@{t}")).collect();
    format!(
        "released={} served={} released_weight={} served_weight={} performance={}\n",
        trace.requests.len(),
        served.join(","),
        trace.released_weight(),
        trace.served_weight(),
        performance(trace)
    )
}
