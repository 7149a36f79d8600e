//! Geodesic spaces of diameter 2: the segment `[-1, 1]`, a star with unit
//! branches, and a circle of circumference 4.

use core::fmt;

use crate::error::{invalid, Result};

const CIRCUMFERENCE: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Segment,
    /// `branches >= 3` unit-length branches glued at the centre.
    Star { branches: usize },
    Circle,
}

/// A location in one of the supported spaces.
///
/// Star points with radius 0 are the centre whatever their branch index.
#[derive(Clone, Copy, Debug)]
pub enum Point {
    Segment(f64),
    Star { branch: usize, radius: f64 },
    Circle(f64),
}

impl Point {
    pub const fn star(branch: usize, radius: f64) -> Self {
        Point::Star { branch, radius }
    }

    /// The segment coordinate, if this is a segment point.
    pub fn as_segment(&self) -> Option<f64> {
        match *self {
            Point::Segment(x) => Some(x),
            _ => None,
        }
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Point::Segment(a), Point::Segment(b)) => a == b,
            (Point::Circle(a), Point::Circle(b)) => a == b,
            (
                Point::Star { branch: b1, radius: r1 },
                Point::Star { branch: b2, radius: r2 },
            ) => (r1 == 0.0 && r2 == 0.0) || (b1 == b2 && r1 == r2),
            _ => false,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Point::Segment(x) => write!(f, "{x}"),
            Point::Star { branch, radius } => write!(f, "[{branch},{radius}]"),
            Point::Circle(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricSpace {
    kind: SpaceKind,
}

impl Default for MetricSpace {
    fn default() -> Self {
        Self::segment()
    }
}

fn wrap_circle(s: f64) -> f64 {
    let r = s % CIRCUMFERENCE;
    let r = if r < 0.0 { r + CIRCUMFERENCE } else { r };
    if r >= CIRCUMFERENCE {
        0.0
    } else {
        r
    }
}

impl MetricSpace {
    pub const fn segment() -> Self {
        Self { kind: SpaceKind::Segment }
    }

    pub fn star(branches: usize) -> Result<Self> {
        if branches < 3 {
            return Err(invalid("a star needs at least 3 branches"));
        }
        Ok(Self { kind: SpaceKind::Star { branches } })
    }

    pub const fn circle() -> Self {
        Self { kind: SpaceKind::Circle }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn diameter(&self) -> f64 {
        2.0
    }

    /// Centred spaces lie in the closed unit ball around their origin.
    pub fn is_centred(&self) -> bool {
        !matches!(self.kind, SpaceKind::Circle)
    }

    pub fn origin(&self) -> Point {
        match self.kind {
            SpaceKind::Segment => Point::Segment(0.0),
            SpaceKind::Star { .. } => Point::star(0, 0.0),
            SpaceKind::Circle => Point::Circle(0.0),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self.kind, *p) {
            (SpaceKind::Segment, Point::Segment(x)) => (-1.0..=1.0).contains(&x),
            (SpaceKind::Star { branches }, Point::Star { branch, radius }) => {
                branch < branches && (0.0..=1.0).contains(&radius)
            }
            (SpaceKind::Circle, Point::Circle(s)) => (0.0..CIRCUMFERENCE).contains(&s),
            _ => false,
        }
    }

    pub fn validate(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(invalid(alloc::format!("point {p} is not in {:?}", self.kind)))
        }
    }

    /// Geodesic distance. Fails when either point belongs to another space.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance between points already known to belong to this space.
    pub(crate) fn dist(&self, a: &Point, b: &Point) -> f64 {
        match (*a, *b) {
            (Point::Segment(x), Point::Segment(y)) => (x - y).abs(),
            (
                Point::Star { branch: b1, radius: r1 },
                Point::Star { branch: b2, radius: r2 },
            ) => {
                if b1 == b2 {
                    (r1 - r2).abs()
                } else {
                    r1 + r2
                }
            }
            (Point::Circle(s), Point::Circle(u)) => {
                let fwd = wrap_circle(u - s);
                fwd.min(CIRCUMFERENCE - fwd)
            }
            _ => f64::INFINITY,
        }
    }

    /// Walks `dist` along a shortest geodesic from `from` to `target`,
    /// stopping at `target`.
    pub fn move_toward(&self, from: &Point, target: &Point, dist: f64) -> Result<Point> {
        self.validate(from)?;
        self.validate(target)?;
        if !(dist >= 0.0) {
            return Err(invalid("move distance must be non-negative"));
        }
        Ok(self.step(from, target, dist))
    }

    pub(crate) fn step(&self, from: &Point, target: &Point, dist: f64) -> Point {
        let total = self.dist(from, target);
        if dist >= total {
            return *target;
        }
        match (*from, *target) {
            (Point::Segment(x), Point::Segment(y)) => {
                Point::Segment(if y >= x { x + dist } else { x - dist })
            }
            (
                Point::Star { branch: b1, radius: r1 },
                Point::Star { branch: b2, radius: r2 },
            ) => {
                if r1 == 0.0 {
                    Point::star(b2, dist)
                } else if b1 == b2 || r2 == 0.0 {
                    if r2 >= r1 {
                        Point::star(b1, r1 + dist)
                    } else {
                        Point::star(b1, r1 - dist)
                    }
                } else if dist <= r1 {
                    Point::star(b1, r1 - dist)
                } else {
                    Point::star(b2, dist - r1)
                }
            }
            (Point::Circle(s), Point::Circle(u)) => {
                // Antipodal ties go in the increasing direction.
                let fwd = wrap_circle(u - s);
                if fwd <= CIRCUMFERENCE - fwd {
                    Point::Circle(wrap_circle(s + dist))
                } else {
                    Point::Circle(wrap_circle(s - dist))
                }
            }
            _ => *from,
        }
    }

    /// Closed-ball membership.
    pub fn ball_membership(&self, p: &Point, centre: &Point, radius: f64) -> Result<bool> {
        Ok(self.distance(p, centre)? <= radius)
    }

    /// Whether `p` lies on the path `step` follows from `from` to `to`.
    pub(crate) fn on_path(&self, from: &Point, to: &Point, p: &Point, tol: f64) -> bool {
        let along = self.dist(from, p);
        if along > self.dist(from, to) + tol {
            return false;
        }
        self.dist(&self.step(from, to, along), p) <= tol
    }

    /// Branch tips (star) or the two segment ends; empty for the circle.
    pub fn extreme_points(&self) -> alloc::vec::Vec<Point> {
        match self.kind {
            SpaceKind::Segment => alloc::vec![Point::Segment(-1.0), Point::Segment(1.0)],
            SpaceKind::Star { branches } => (0..branches).map(|b| Point::star(b, 1.0)).collect(),
            SpaceKind::Circle => alloc::vec::Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameter_pairs() {
        let seg = MetricSpace::segment();
        assert_eq!(seg.distance(&Point::Segment(-1.0), &Point::Segment(1.0)).unwrap(), 2.0);
        let star = MetricSpace::star(3).unwrap();
        assert_eq!(star.distance(&Point::star(0, 1.0), &Point::star(1, 1.0)).unwrap(), 2.0);
        let c = MetricSpace::circle();
        assert_eq!(c.distance(&Point::Circle(0.0), &Point::Circle(3.0)).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_kinds_rejected() {
        let seg = MetricSpace::segment();
        assert!(seg.distance(&Point::Segment(0.0), &Point::Circle(1.0)).is_err());
        assert!(seg.distance(&Point::Segment(1.5), &Point::Segment(0.0)).is_err());
        assert!(MetricSpace::star(2).is_err());
    }

    #[test]
    fn moves() {
        let seg = MetricSpace::segment();
        let p = seg.move_toward(&Point::Segment(0.0), &Point::Segment(-1.0), 0.25).unwrap();
        assert_eq!(p, Point::Segment(-0.25));

        let star = MetricSpace::star(3).unwrap();
        let p = star.move_toward(&Point::star(0, 0.5), &Point::star(2, 1.0), 1.0).unwrap();
        assert_eq!(p, Point::star(2, 0.5));

        let c = MetricSpace::circle();
        let p = c.move_toward(&Point::Circle(0.0), &Point::Circle(1.9), 1.9).unwrap();
        assert_eq!(p, Point::Circle(1.9));
        let p = c.move_toward(&Point::Circle(0.0), &Point::Circle(3.0), 0.5).unwrap();
        assert_eq!(p, Point::Circle(3.5));
        // antipodal tie goes forward
        let p = c.move_toward(&Point::Circle(1.0), &Point::Circle(3.0), 0.5).unwrap();
        assert_eq!(p, Point::Circle(1.5));
        assert!(c.move_toward(&Point::Circle(1.0), &Point::Circle(3.0), -0.1).is_err());
    }

    #[test]
    fn balls() {
        let seg = MetricSpace::segment();
        let o = seg.origin();
        assert!(seg.ball_membership(&Point::Segment(0.3), &o, 0.5).unwrap());
        assert!(!seg.ball_membership(&Point::Segment(0.6), &o, 0.5).unwrap());
        let star = MetricSpace::star(3).unwrap();
        assert!(star.ball_membership(&Point::star(1, 0.4), &star.origin(), 0.5).unwrap());
    }

    #[test]
    fn star_centre_equality() {
        assert_eq!(Point::star(0, 0.0), Point::star(2, 0.0));
        assert_ne!(Point::star(0, 0.1), Point::star(2, 0.1));
        let star = MetricSpace::star(4).unwrap();
        assert_eq!(star.dist(&Point::star(3, 0.0), &Point::star(1, 0.7)), 0.7);
    }

    #[test]
    fn centred() {
        assert!(MetricSpace::segment().is_centred());
        assert!(MetricSpace::star(3).unwrap().is_centred());
        assert!(!MetricSpace::circle().is_centred());
    }
}
