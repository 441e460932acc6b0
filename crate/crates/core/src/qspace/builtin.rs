//! Builtin quasi-metrics on the real line, the circle, the half-line and `R^d`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{outside, Interval, QuasiMetric};
use crate::error::{Error, Result};

/// Scalar quasi-metrics, named by their string identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinMetric {
    /// `q(x, y) = y - x` if `y >= x`, else `1`.
    Sorgenfrey,
    /// `q(x, y) = max(y - x, 0)`.
    OneSidedDiff,
    /// `q(x, y) = max(0, ln(y / x))` on the positive reals.
    HalfLineLog,
    /// Counterclockwise arc length on the unit circle, angles in `[0, 2π)`.
    CircularRailroad,
    /// `q(x, y) = x - y` if `x >= y`, else `1`, on `[0, 1]`.
    Remark46,
    /// The ordinary symmetric metric `|x - y|`.
    AbsDiff,
}

impl BuiltinMetric {
    pub const ALL: [BuiltinMetric; 6] = [
        BuiltinMetric::Sorgenfrey,
        BuiltinMetric::OneSidedDiff,
        BuiltinMetric::HalfLineLog,
        BuiltinMetric::CircularRailroad,
        BuiltinMetric::Remark46,
        BuiltinMetric::AbsDiff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinMetric::Sorgenfrey => "sorgenfrey",
            BuiltinMetric::OneSidedDiff => "one_sided_diff",
            BuiltinMetric::HalfLineLog => "half_line_log",
            BuiltinMetric::CircularRailroad => "circular_railroad",
            BuiltinMetric::Remark46 => "remark46",
            BuiltinMetric::AbsDiff => "abs_diff",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    /// The largest universe the formula is defined on.
    pub fn natural_domain(self) -> RealDomain {
        match self {
            BuiltinMetric::HalfLineLog => RealDomain {
                lo: 0.0,
                hi: f64::INFINITY,
                lo_open: true,
                hi_open: true,
            },
            BuiltinMetric::CircularRailroad => RealDomain {
                lo: 0.0,
                hi: TAU,
                lo_open: false,
                hi_open: true,
            },
            BuiltinMetric::Remark46 => RealDomain::closed(0.0, 1.0),
            _ => RealDomain::closed(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            BuiltinMetric::Sorgenfrey => {
                if y >= x {
                    y - x
                } else {
                    1.0
                }
            }
            BuiltinMetric::OneSidedDiff => (y - x).max(0.0),
            BuiltinMetric::HalfLineLog => (y / x).ln().max(0.0),
            BuiltinMetric::CircularRailroad => {
                if y >= x {
                    y - x
                } else {
                    y - x + TAU
                }
            }
            BuiltinMetric::Remark46 => {
                if x >= y {
                    x - y
                } else {
                    1.0
                }
            }
            BuiltinMetric::AbsDiff => (x - y).abs(),
        }
    }
}

/// A real interval universe with open/closed ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealDomain {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_open: bool,
    #[serde(default)]
    pub hi_open: bool,
}

impl RealDomain {
    pub fn closed(lo: f64, hi: f64) -> Self {
        RealDomain {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        if !t.is_finite() {
            return false;
        }
        let above = if self.lo_open { t > self.lo } else { t >= self.lo };
        let below = if self.hi_open { t < self.hi } else { t <= self.hi };
        above && below
    }

    fn within(&self, outer: &RealDomain) -> bool {
        let lo_ok = self.lo > outer.lo || (self.lo == outer.lo && (self.lo_open || !outer.lo_open));
        let hi_ok = self.hi < outer.hi || (self.hi == outer.hi && (self.hi_open || !outer.hi_open));
        lo_ok && hi_ok
    }

    /// Closure of the domain as an interval; used to clip interval images.
    pub fn extent(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }
}

/// A builtin scalar quasi-metric restricted to a real domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSpace {
    metric: BuiltinMetric,
    domain: RealDomain,
}

impl ScalarSpace {
    pub fn new(metric: BuiltinMetric) -> Self {
        ScalarSpace {
            metric,
            domain: metric.natural_domain(),
        }
    }

    /// Restricts the metric to a subdomain of its natural domain.
    pub fn with_domain(metric: BuiltinMetric, domain: RealDomain) -> Result<Self> {
        if !(domain.lo <= domain.hi) || !domain.within(&metric.natural_domain()) {
            return Err(Error::param(
                "domain",
                format!("{domain:?} is not inside the domain of {}", metric.name()),
            ));
        }
        Ok(ScalarSpace { metric, domain })
    }

    pub fn metric(&self) -> BuiltinMetric {
        self.metric
    }

    pub fn domain(&self) -> RealDomain {
        self.domain
    }
}

impl QuasiMetric for ScalarSpace {
    type Point = f64;

    fn distance(&self, x: &f64, y: &f64) -> Result<f64> {
        if !self.domain.contains(*x) {
            return Err(outside(self, x));
        }
        if !self.domain.contains(*y) {
            return Err(outside(self, y));
        }
        if x == y {
            return Ok(0.0);
        }
        Ok(self.metric.eval(*x, *y))
    }

    fn contains(&self, x: &f64) -> bool {
        self.domain.contains(*x)
    }

    fn scalar_extent(&self) -> Option<Interval> {
        Some(self.domain.extent())
    }

    fn sup_over_interval(&self, x: &f64, iv: &Interval) -> Option<(f64, f64)> {
        let (x, lo, hi) = (*x, iv.lo, iv.hi);
        if !iv.is_bounded() || iv.is_empty() {
            return None;
        }
        // Ties go to the least maximizer.
        let best = |cands: &[(f64, f64)]| {
            cands.iter().copied().fold(None, |acc: Option<(f64, f64)>, c| match acc {
                Some(a) if a.0 > c.0 || (a.0 == c.0 && a.1 <= c.1) => Some(a),
                _ => Some(c),
            })
        };
        match self.metric {
            BuiltinMetric::Remark46 => {
                // x - u on [lo, min(hi, x)], 1 on (x, hi]; when lo <= x the
                // piece (x, hi] has no least element, so hi is reported.
                let mut c = Vec::with_capacity(2);
                if lo <= x {
                    c.push((x - lo, lo));
                }
                if hi > x {
                    c.push((1.0, if lo > x { lo } else { hi }));
                }
                best(&c)
            }
            BuiltinMetric::Sorgenfrey => {
                let mut c = Vec::with_capacity(2);
                if lo < x {
                    c.push((1.0, lo));
                }
                if hi >= x {
                    c.push((hi - x, hi));
                }
                best(&c)
            }
            BuiltinMetric::OneSidedDiff => Some(if hi > x { (hi - x, hi) } else { (0.0, lo) }),
            BuiltinMetric::HalfLineLog => {
                Some(if hi > x { ((hi / x).ln().max(0.0), hi) } else { (0.0, lo) })
            }
            BuiltinMetric::AbsDiff => best(&[((x - lo).abs(), lo), ((hi - x).abs(), hi)]),
            BuiltinMetric::CircularRailroad => {
                if lo >= x {
                    Some((hi - x, hi))
                } else if hi < x {
                    Some((hi - x + TAU, hi))
                } else {
                    // sup approaches 2π from below just left of x; not attained
                    None
                }
            }
        }
    }
}

/// One half-space `{ z : a·z <= b }` of a gauge set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Minkowski gauge `q(x, y) = inf { α > 0 : y - x ∈ αB }` where `B` is a
/// bounded polytope given by half-spaces with positive offsets, so the gauge
/// is `max_i (a_i·(y - x)) / b_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeSpace {
    halfspaces: Vec<HalfSpace>,
    #[serde(skip)]
    dim: usize,
}

const DIRECTION_PROBES: usize = 256;

impl GaugeSpace {
    pub fn new(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        let Some(first) = halfspaces.first() else {
            return Err(Error::param("halfspaces", "at least one half-space is required"));
        };
        let dim = first.a.len();
        if dim == 0 {
            return Err(Error::param("halfspaces", "normals must be nonempty"));
        }
        for (i, h) in halfspaces.iter().enumerate() {
            if h.a.len() != dim {
                return Err(Error::param(
                    "halfspaces",
                    format!("half-space {i} has dimension {}, expected {dim}", h.a.len()),
                ));
            }
            if !(h.b > 0.0) || !h.b.is_finite() || h.a.iter().any(|v| !v.is_finite()) {
                return Err(Error::param(
                    "halfspaces",
                    format!("half-space {i} needs finite normal and offset b > 0"),
                ));
            }
        }
        let space = GaugeSpace { halfspaces, dim };
        // Boundedness: every direction must leave B through some face.
        let mut probes: Vec<Vec<f64>> = Vec::new();
        for j in 0..dim {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; dim];
                v[j] = s;
                probes.push(v);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x0067_6175_6765);
        for _ in 0..DIRECTION_PROBES {
            probes.push((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        for v in &probes {
            if v.iter().all(|t| *t == 0.0) {
                continue;
            }
            if space.raw_gauge(v) <= 0.0 {
                return Err(Error::UnboundedGauge {
                    direction: format!("{v:?}"),
                });
            }
        }
        Ok(space)
    }

    /// The unit cube `[-1, 1]^d`, whose gauge is the max-norm.
    pub fn unit_cube(dim: usize) -> Self {
        let mut hs = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; dim];
                a[j] = s;
                hs.push(HalfSpace { a, b: 1.0 });
            }
        }
        GaugeSpace::new(hs).expect("unit cube is bounded")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            halfspaces: Vec<HalfSpace>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        GaugeSpace::new(doc.halfspaces)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    fn raw_gauge(&self, delta: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.a.iter().zip(delta).map(|(a, d)| a * d).sum::<f64>() / h.b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl QuasiMetric for GaugeSpace {
    type Point = Vec<f64>;

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<f64> {
        if !self.contains(x) {
            return Err(outside(self, x));
        }
        if !self.contains(y) {
            return Err(outside(self, y));
        }
        let delta: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - a).collect();
        if delta.iter().all(|d| *d == 0.0) {
            return Ok(0.0);
        }
        let g = self.raw_gauge(&delta);
        if g <= 0.0 {
            return Err(Error::UnboundedGauge {
                direction: format!("{delta:?}"),
            });
        }
        Ok(g)
    }

    fn contains(&self, x: &Vec<f64>) -> bool {
        x.len() == self.dim && x.iter().all(|t| t.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorgenfrey_values() {
        let s = ScalarSpace::new(BuiltinMetric::Sorgenfrey);
        assert_eq!(s.distance(&1.0, &3.0).unwrap(), 2.0);
        assert_eq!(s.distance(&3.0, &1.0).unwrap(), 1.0);
    }

    #[test]
    fn remark_metric_values() {
        let s = ScalarSpace::new(BuiltinMetric::Remark46);
        assert!((s.distance(&0.5, &0.2).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(s.distance(&0.2, &0.5).unwrap(), 1.0);
        assert!(s.distance(&1.5, &0.2).is_err());
    }

    #[test]
    fn zero_diagonal_everywhere() {
        for m in BuiltinMetric::ALL {
            let s = ScalarSpace::new(m);
            for x in [0.1, 0.5, 0.9] {
                assert_eq!(s.distance(&x, &x).unwrap(), 0.0, "{}", m.name());
            }
        }
        let g = GaugeSpace::unit_cube(3);
        assert_eq!(g.distance(&vec![1.0, 2.0, 3.0], &vec![1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn half_line_and_circle() {
        let h = ScalarSpace::new(BuiltinMetric::HalfLineLog);
        assert_eq!(h.distance(&2.0, &1.0).unwrap(), 0.0);
        assert!((h.distance(&1.0, &std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!(h.distance(&0.0, &1.0).is_err());
        let c = ScalarSpace::new(BuiltinMetric::CircularRailroad);
        assert!((c.distance(&1.0, &0.5).unwrap() - (TAU - 0.5)).abs() < 1e-15);
        assert!(c.distance(&TAU, &0.5).is_err());
    }

    #[test]
    fn gauge_matches_max_norm_on_cube() {
        let g = GaugeSpace::unit_cube(2);
        assert_eq!(g.distance(&vec![0.0, 0.0], &vec![0.5, -2.0]).unwrap(), 2.0);
    }

    #[test]
    fn gauge_rejects_unbounded_sets() {
        // a half-plane is unbounded
        let hs = vec![HalfSpace { a: vec![1.0, 0.0], b: 1.0 }];
        assert!(matches!(GaugeSpace::new(hs), Err(Error::UnboundedGauge { .. })));
        let bad = vec![HalfSpace { a: vec![1.0], b: -1.0 }];
        assert!(GaugeSpace::new(bad).is_err());
    }

    #[test]
    fn gauge_json() {
        let g = GaugeSpace::from_json(
            r#"{"halfspaces": [{"a": [1], "b": 2}, {"a": [-1], "b": 1}]}"#,
        )
        .unwrap();
        // B = [-1, 2]: moving right by 1 costs 1/2, moving left by 1 costs 1
        assert_eq!(g.distance(&vec![0.0], &vec![1.0]).unwrap(), 0.5);
        assert_eq!(g.distance(&vec![1.0], &vec![0.0]).unwrap(), 1.0);
    }

    #[test]
    fn subdomains_must_nest() {
        assert!(ScalarSpace::with_domain(BuiltinMetric::Remark46, RealDomain::closed(0.0, 2.0)).is_err());
        assert!(ScalarSpace::with_domain(BuiltinMetric::HalfLineLog, RealDomain::closed(0.0, 2.0)).is_err());
        assert!(ScalarSpace::with_domain(BuiltinMetric::HalfLineLog, RealDomain::closed(0.5, 2.0)).is_ok());
    }

    #[test]
    fn closed_form_sup_agrees_with_dense_grid() {
        for m in BuiltinMetric::ALL {
            let space = ScalarSpace::with_domain(m, RealDomain::closed(0.25, 0.75)).unwrap();
            for x in [0.3, 0.5, 0.7] {
                for iv in [Interval::new(0.25, 0.75), Interval::new(0.25, 0.4), Interval::new(0.6, 0.75)] {
                    let Some((sup, arg)) = space.sup_over_interval(&x, &iv) else {
                        continue;
                    };
                    assert!(iv.contains(arg));
                    assert_eq!(space.distance(&x, &arg).unwrap(), sup, "{} x={x} {iv:?}", m.name());
                    for u in iv.grid(2001) {
                        assert!(space.distance(&x, &u).unwrap() <= sup + 1e-12);
                    }
                }
            }
        }
    }
}
