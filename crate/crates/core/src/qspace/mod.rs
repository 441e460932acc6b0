//! Quasi-metric spaces.
//!
//! A quasi-metric is a nonnegative bifunction with zero diagonal that obeys
//! the triangle inequality. Symmetry is not required, so every notion that
//! depends on the order of arguments (balls, limits, Cauchy sequences) comes
//! in a forward and a backward flavour.

mod builtin;
mod finite;
mod sampling;

pub use builtin::{BuiltinMetric, GaugeSpace, HalfSpace, RealDomain, ScalarSpace};
pub use finite::{check_axioms, tabulate, FiniteQuasiMetricSpace};
pub use sampling::{check_axioms_sampled, SamplePoints};

use std::cmp::Ordering;
use std::fmt::Debug;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element type of a universe.
///
/// Builtin continuous spaces use `f64` or `Vec<f64>`; finite spaces use the
/// point index `usize`.
pub trait PointValue: Clone + PartialEq + Debug + Send + Sync + Serialize + DeserializeOwned {
    /// Total order used for deterministic tie-breaking.
    fn tie_cmp(&self, other: &Self) -> Ordering;

    fn as_scalar(&self) -> Option<f64> {
        None
    }

    fn from_scalar(_t: f64) -> Option<Self> {
        None
    }
}

impl PointValue for usize {
    fn tie_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl PointValue for f64 {
    fn tie_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }

    fn as_scalar(&self) -> Option<f64> {
        Some(*self)
    }

    fn from_scalar(t: f64) -> Option<Self> {
        Some(t)
    }
}

impl PointValue for Vec<f64> {
    fn tie_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.iter().zip(other) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.len().cmp(&other.len())
    }
}

/// A closed real interval `[lo, hi]`; empty when `lo > hi`.
///
/// Endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// `count` evenly spaced points including both endpoints.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        if self.is_empty() || !self.is_bounded() {
            return Vec::new();
        }
        if self.lo == self.hi || count < 2 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (count - 1) as f64;
        (0..count)
            .map(|i| {
                if i + 1 == count {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

/// A universe with a quasi-metric on it.
pub trait QuasiMetric: Send + Sync {
    type Point: PointValue;

    /// `q(x, y)`; errors when either point lies outside the universe.
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<f64>;

    fn contains(&self, x: &Self::Point) -> bool;

    /// Every point of the universe, when it is finite.
    fn points(&self) -> Option<Vec<Self::Point>> {
        None
    }

    /// Scalar universes report their extent so interval images can be clipped.
    fn scalar_extent(&self) -> Option<Interval> {
        None
    }

    /// Closed form of `sup { q(x, u) : u in [lo, hi] }` with a maximizer, when
    /// the metric admits one. The interval is already clipped to the universe
    /// and nonempty.
    fn sup_over_interval(&self, _x: &Self::Point, _iv: &Interval) -> Option<(f64, Self::Point)> {
        None
    }

    fn point_to_json(&self, x: &Self::Point) -> serde_json::Value {
        serde_json::to_value(x).unwrap_or(serde_json::Value::Null)
    }

    fn point_from_json(&self, v: &serde_json::Value) -> Result<Self::Point> {
        let p: Self::Point = serde_json::from_value(v.clone())?;
        if !self.contains(&p) {
            return Err(Error::PointOutsideUniverse {
                point: v.to_string(),
            });
        }
        Ok(p)
    }

    fn describe(&self, x: &Self::Point) -> String {
        self.point_to_json(x).to_string()
    }
}

impl<S: QuasiMetric + ?Sized> QuasiMetric for &S {
    type Point = S::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<f64> {
        (**self).distance(x, y)
    }
    fn contains(&self, x: &Self::Point) -> bool {
        (**self).contains(x)
    }
    fn points(&self) -> Option<Vec<Self::Point>> {
        (**self).points()
    }
    fn scalar_extent(&self) -> Option<Interval> {
        (**self).scalar_extent()
    }
    fn sup_over_interval(&self, x: &Self::Point, iv: &Interval) -> Option<(f64, Self::Point)> {
        (**self).sup_over_interval(x, iv)
    }
    fn point_to_json(&self, x: &Self::Point) -> serde_json::Value {
        (**self).point_to_json(x)
    }
    fn point_from_json(&self, v: &serde_json::Value) -> Result<Self::Point> {
        (**self).point_from_json(v)
    }
}

pub(crate) fn outside<S: QuasiMetric + ?Sized>(space: &S, x: &S::Point) -> Error {
    Error::PointOutsideUniverse {
        point: format!("{:?}", space.point_to_json(x)),
    }
}

/// The conjugate quasi-metric `q̄(x, y) = q(y, x)` on the same universe.
#[derive(Clone, Debug)]
pub struct Conjugate<S>(pub S);

pub fn conjugate<S: QuasiMetric>(space: S) -> Conjugate<S> {
    Conjugate(space)
}

impl<S: QuasiMetric> QuasiMetric for Conjugate<S> {
    type Point = S::Point;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<f64> {
        self.0.distance(y, x)
    }
    fn contains(&self, x: &Self::Point) -> bool {
        self.0.contains(x)
    }
    fn points(&self) -> Option<Vec<Self::Point>> {
        self.0.points()
    }
    fn scalar_extent(&self) -> Option<Interval> {
        self.0.scalar_extent()
    }
    fn point_to_json(&self, x: &Self::Point) -> serde_json::Value {
        self.0.point_to_json(x)
    }
    fn point_from_json(&self, v: &serde_json::Value) -> Result<Self::Point> {
        self.0.point_from_json(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    /// Distance measured in this direction: forward `q(from, to)`, backward `q(to, from)`.
    pub fn measure<S: QuasiMetric + ?Sized>(
        self,
        space: &S,
        from: &S::Point,
        to: &S::Point,
    ) -> Result<f64> {
        match self {
            Direction::Forward => space.distance(from, to),
            Direction::Backward => space.distance(to, from),
        }
    }
}

/// Open ball. Forward balls hold `y` with `q(center, y) < radius`, backward
/// balls `y` with `q(y, center) < radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<P> {
    pub center: P,
    pub radius: f64,
    pub direction: Direction,
}

impl<P> Ball<P> {
    pub fn new(center: P, radius: f64, direction: Direction) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::param("radius", format!("must be positive, got {radius}")));
        }
        Ok(Ball {
            center,
            radius,
            direction,
        })
    }
}

pub fn ball_membership<S: QuasiMetric + ?Sized>(
    space: &S,
    ball: &Ball<S::Point>,
    y: &S::Point,
) -> Result<bool> {
    if !(ball.radius > 0.0) {
        return Err(Error::param("radius", "must be positive"));
    }
    Ok(ball.direction.measure(space, &ball.center, y)? < ball.radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorgenfrey_balls() {
        let s = ScalarSpace::new(BuiltinMetric::Sorgenfrey);
        let fwd = Ball::new(0.0, 0.5, Direction::Forward).unwrap();
        assert!(ball_membership(&s, &fwd, &0.3).unwrap());
        assert!(ball_membership(&s, &fwd, &0.0).unwrap());
        // q(0, -0.1) = 1
        assert!(!ball_membership(&s, &fwd, &-0.1).unwrap());
    }

    #[test]
    fn remark_metric_forward_and_backward_balls_differ() {
        let s = ScalarSpace::new(BuiltinMetric::Remark46);
        let back = Ball::new(0.0, 0.5, Direction::Backward).unwrap();
        let fwd = Ball::new(0.0, 0.5, Direction::Forward).unwrap();
        // q(0.3, 0) = 0.3, q(0, 0.3) = 1
        assert!(ball_membership(&s, &back, &0.3).unwrap());
        assert!(!ball_membership(&s, &fwd, &0.3).unwrap());
        for r in [0.01, 1.0, 7.0] {
            let b = Ball::new(0.4, r, Direction::Forward).unwrap();
            assert!(ball_membership(&s, &b, &0.4).unwrap());
        }
    }

    #[test]
    fn ball_rejects_bad_radius_and_outside_points() {
        assert!(Ball::new(0.0, 0.0, Direction::Forward).is_err());
        let s = ScalarSpace::new(BuiltinMetric::Remark46);
        let b = Ball::new(0.0, 0.5, Direction::Forward).unwrap();
        assert!(matches!(
            ball_membership(&s, &b, &2.0),
            Err(Error::PointOutsideUniverse { .. })
        ));
    }

    #[test]
    fn conjugate_swaps_arguments() {
        let s = ScalarSpace::new(BuiltinMetric::Sorgenfrey);
        let c = conjugate(s.clone());
        assert_eq!(c.distance(&1.0, &3.0).unwrap(), 1.0);
        assert_eq!(c.distance(&3.0, &1.0).unwrap(), 2.0);
        let cc = conjugate(conjugate(s.clone()));
        for (x, y) in [(0.25, 2.0), (3.5, -1.0), (1.0, 1.0)] {
            assert_eq!(cc.distance(&x, &y).unwrap(), s.distance(&x, &y).unwrap());
        }
        let m = ScalarSpace::new(BuiltinMetric::AbsDiff);
        let cm = conjugate(m.clone());
        for (x, y) in [(0.25, 2.0), (3.5, -1.0)] {
            assert_eq!(cm.distance(&x, &y).unwrap(), m.distance(&x, &y).unwrap());
        }
    }

    #[test]
    fn interval_grid_includes_endpoints() {
        let g = Interval::new(0.0, 1.0).grid(5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(Interval::new(1.0, 0.0).is_empty());
        assert!(Interval::new(1.0, 0.0).grid(5).is_empty());
        assert_eq!(Interval::new(0.3, 0.3).grid(10), vec![0.3]);
    }
}
