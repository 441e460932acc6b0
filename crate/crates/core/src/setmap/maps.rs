use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use super::image::{normalize, Image};
use crate::error::{Error, Result};
use crate::qspace::{FiniteQuasiMetricSpace, Interval, PointValue, QuasiMetric};

/// A set-valued map `Φ: X ⇉ X`.
pub trait SetValuedMap: Send + Sync {
    type Point: PointValue;

    /// `Φ(x)`; errors when `x` lies outside the universe.
    fn image(&self, x: &Self::Point) -> Result<Image<Self::Point>>;

    /// Exact membership test `u ∈ Φ(x)`.
    fn member(&self, x: &Self::Point, u: &Self::Point) -> Result<bool>;
}

impl<M: SetValuedMap + ?Sized> SetValuedMap for &M {
    type Point = M::Point;

    fn image(&self, x: &Self::Point) -> Result<Image<Self::Point>> {
        (**self).image(x)
    }

    fn member(&self, x: &Self::Point, u: &Self::Point) -> Result<bool> {
        (**self).member(x, u)
    }
}

impl<P: PointValue> SetValuedMap for Box<dyn SetValuedMap<Point = P>> {
    type Point = P;

    fn image(&self, x: &P) -> Result<Image<P>> {
        (**self).image(x)
    }

    fn member(&self, x: &P, u: &P) -> Result<bool> {
        (**self).member(x, u)
    }
}

fn outside_index(x: usize) -> Error {
    Error::PointOutsideUniverse {
        point: x.to_string(),
    }
}

/// A map on `{0, .., n-1}` given by an explicit table of images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionalMap {
    images: Vec<Vec<usize>>,
}

impl ExtensionalMap {
    /// `images[x]` lists `Φ(x)`; duplicates are dropped.
    pub fn new(images: Vec<Vec<usize>>) -> Result<Self> {
        let n = images.len();
        let images = images
            .into_iter()
            .map(|im| {
                if let Some(&u) = im.iter().find(|&&u| u >= n) {
                    return Err(outside_index(u));
                }
                Ok(normalize(im))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtensionalMap { images })
    }

    pub fn identity(n: usize) -> Self {
        ExtensionalMap {
            images: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    pub fn image_of(&self, x: usize) -> &[usize] {
        &self.images[x]
    }

    /// Loads `{"images": {"a": ["a", "b"], ...}}`; labels missing from the
    /// table get an empty image.
    pub fn from_json(text: &str, space: &FiniteQuasiMetricSpace) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Doc {
            images: BTreeMap<String, Vec<String>>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let mut images = vec![Vec::new(); space.len()];
        for (k, vs) in doc.images {
            let x = space.index_of(&k).ok_or_else(|| Error::UnknownLabel(k.clone()))?;
            images[x] = vs
                .iter()
                .map(|v| space.index_of(v).ok_or_else(|| Error::UnknownLabel(v.clone())))
                .collect::<Result<_>>()?;
        }
        Self::new(images)
    }

    pub fn to_json(&self, space: &FiniteQuasiMetricSpace) -> Value {
        let images: serde_json::Map<String, Value> = self
            .images
            .iter()
            .enumerate()
            .map(|(x, im)| {
                let vs = im.iter().map(|&u| Value::from(space.label(u))).collect();
                (space.label(x).to_string(), Value::Array(vs))
            })
            .collect();
        serde_json::json!({ "images": images })
    }
}

impl SetValuedMap for ExtensionalMap {
    type Point = usize;

    fn image(&self, x: &usize) -> Result<Image<usize>> {
        self.images
            .get(*x)
            .map(|im| Image::Finite(im.clone()))
            .ok_or_else(|| outside_index(*x))
    }

    fn member(&self, x: &usize, u: &usize) -> Result<bool> {
        let im = self.images.get(*x).ok_or_else(|| outside_index(*x))?;
        Ok(im.binary_search(u).is_ok())
    }
}

type EndpointFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A map on a real interval universe with `Φ(x) = [lo(x), hi(x)]` clipped to
/// the universe.
#[derive(Clone)]
pub struct IntervalMap {
    universe: Interval,
    lo: EndpointFn,
    hi: EndpointFn,
    name: String,
}

impl fmt::Debug for IntervalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntervalMap")
            .field("universe", &self.universe)
            .field("name", &self.name)
            .finish()
    }
}

impl IntervalMap {
    pub fn new(
        universe: Interval,
        name: impl Into<String>,
        lo: impl Fn(f64) -> f64 + Send + Sync + 'static,
        hi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        IntervalMap {
            universe,
            lo: Arc::new(lo),
            hi: Arc::new(hi),
            name: name.into(),
        }
    }

    /// `Φ(x) = [0, x]`.
    pub fn zero_to_x(universe: Interval) -> Self {
        Self::new(universe, "interval_0_x", |_| 0.0, |x| x)
    }

    /// `Φ(x) = (-∞, x]` within the universe.
    pub fn lower_set(universe: Interval) -> Self {
        Self::new(universe, "lower_set", |_| f64::NEG_INFINITY, |x| x)
    }

    /// `Φ(x) = [x, ∞)` within the universe.
    pub fn upper_set(universe: Interval) -> Self {
        Self::new(universe, "upper_set", |x| x, |_| f64::INFINITY)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> Interval {
        self.universe
    }

    fn check(&self, x: f64) -> Result<()> {
        if x.is_finite() && self.universe.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideUniverse {
                point: x.to_string(),
            })
        }
    }

    pub fn interval(&self, x: f64) -> Result<Interval> {
        self.check(x)?;
        Ok(Interval::new((self.lo)(x), (self.hi)(x)).intersect(&self.universe))
    }
}

impl SetValuedMap for IntervalMap {
    type Point = f64;

    fn image(&self, x: &f64) -> Result<Image<f64>> {
        Ok(Image::Interval(self.interval(*x)?))
    }

    fn member(&self, x: &f64, u: &f64) -> Result<bool> {
        self.check(*u)?;
        Ok(self.interval(*x)?.contains(*u))
    }
}

type MemberFn<P> = Arc<dyn Fn(&P, &P) -> bool + Send + Sync>;
type SamplerFn<P> = Arc<dyn Fn(&P) -> Vec<P> + Send + Sync>;
type DomainFn<P> = Arc<dyn Fn(&P) -> bool + Send + Sync>;

/// A map given by a membership predicate `(x, u) ↦ u ∈ Φ(x)` and an optional
/// sampler proposing candidate members. Images are `Sampled`.
#[derive(Clone)]
pub struct PredicateMap<P> {
    domain: DomainFn<P>,
    member: MemberFn<P>,
    sampler: Option<SamplerFn<P>>,
}

impl<P> fmt::Debug for PredicateMap<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateMap")
            .field("sampler", &self.sampler.is_some())
            .finish()
    }
}

impl<P: PointValue> PredicateMap<P> {
    pub fn new(
        domain: impl Fn(&P) -> bool + Send + Sync + 'static,
        member: impl Fn(&P, &P) -> bool + Send + Sync + 'static,
    ) -> Self {
        PredicateMap {
            domain: Arc::new(domain),
            member: Arc::new(member),
            sampler: None,
        }
    }

    pub fn with_sampler(mut self, sampler: impl Fn(&P) -> Vec<P> + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }
}

impl<P: PointValue> SetValuedMap for PredicateMap<P> {
    type Point = P;

    fn image(&self, x: &P) -> Result<Image<P>> {
        if !(self.domain)(x) {
            return Err(Error::PointOutsideUniverse {
                point: format!("{x:?}"),
            });
        }
        let sampler = self.sampler.as_ref().ok_or_else(|| {
            Error::ImageNotComputable("predicate map has no sampler".into())
        })?;
        let cands = sampler(x)
            .into_iter()
            .filter(|u| (self.domain)(u) && (self.member)(x, u))
            .collect();
        Ok(Image::sampled(cands))
    }

    fn member(&self, x: &P, u: &P) -> Result<bool> {
        for p in [x, u] {
            if !(self.domain)(p) {
                return Err(Error::PointOutsideUniverse {
                    point: format!("{p:?}"),
                });
            }
        }
        Ok((self.member)(x, u))
    }
}

/// `Φ(x) = {x}` on any space.
#[derive(Clone, Debug)]
pub struct IdentityMap<S> {
    space: S,
}

impl<S: QuasiMetric> IdentityMap<S> {
    pub fn new(space: S) -> Self {
        IdentityMap { space }
    }
}

impl<S: QuasiMetric> SetValuedMap for IdentityMap<S> {
    type Point = S::Point;

    fn image(&self, x: &S::Point) -> Result<Image<S::Point>> {
        if !self.space.contains(x) {
            return Err(crate::qspace::outside(&self.space, x));
        }
        Ok(match x.as_scalar() {
            Some(t) => Image::Interval(Interval::new(t, t)),
            None => Image::Finite(vec![x.clone()]),
        })
    }

    fn member(&self, x: &S::Point, u: &S::Point) -> Result<bool> {
        for p in [x, u] {
            if !self.space.contains(p) {
                return Err(crate::qspace::outside(&self.space, p));
            }
        }
        Ok(x == u)
    }
}

type ObjectiveFn<P> = Arc<dyn Fn(&P) -> f64 + Send + Sync>;

/// `Φ(x) = { u : f(u) + λ q(x, u) <= f(x) }`.
///
/// On finite spaces images are computed exactly. Elsewhere they are
/// restricted to the supplied candidate points (plus `x` itself) and marked
/// sampled.
#[derive(Clone)]
pub struct DescentMap<S: QuasiMetric> {
    space: S,
    f: ObjectiveFn<S::Point>,
    lambda: f64,
    tol: f64,
    candidates: Vec<S::Point>,
}

impl<S: QuasiMetric + fmt::Debug> fmt::Debug for DescentMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DescentMap")
            .field("space", &self.space)
            .field("lambda", &self.lambda)
            .field("tol", &self.tol)
            .field("candidates", &self.candidates.len())
            .finish()
    }
}

impl<S: QuasiMetric> DescentMap<S> {
    pub fn new(
        space: S,
        f: impl Fn(&S::Point) -> f64 + Send + Sync + 'static,
        lambda: f64,
    ) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
        }
        Ok(DescentMap {
            space,
            f: Arc::new(f),
            lambda,
            tol: 0.0,
            candidates: Vec::new(),
        })
    }

    /// Candidate points used on spaces that cannot list their universe.
    pub fn with_candidates(mut self, candidates: Vec<S::Point>) -> Self {
        self.candidates = candidates;
        self
    }

    /// Absolute slack in the descent inequality, to absorb rounding.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn space(&self) -> &S {
        &self.space
    }

    pub fn objective(&self, x: &S::Point) -> f64 {
        (self.f)(x)
    }

    fn test(&self, x: &S::Point, u: &S::Point) -> Result<bool> {
        let q = self.space.distance(x, u)?;
        Ok((self.f)(u) + self.lambda * q <= (self.f)(x) + self.tol)
    }
}

impl<S: QuasiMetric> SetValuedMap for DescentMap<S> {
    type Point = S::Point;

    fn image(&self, x: &S::Point) -> Result<Image<S::Point>> {
        if !self.space.contains(x) {
            return Err(crate::qspace::outside(&self.space, x));
        }
        let (pts, exact) = match self.space.points() {
            Some(all) => (all, true),
            None => {
                let mut c = self.candidates.clone();
                c.push(x.clone());
                (c, false)
            }
        };
        let mut members = Vec::new();
        for u in pts {
            if self.space.contains(&u) && self.test(x, &u)? {
                members.push(u);
            }
        }
        Ok(if exact {
            Image::finite(members)
        } else {
            Image::sampled(members)
        })
    }

    fn member(&self, x: &S::Point, u: &S::Point) -> Result<bool> {
        self.test(x, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspace::{BuiltinMetric, ScalarSpace};

    fn unit() -> Interval {
        Interval::new(0.0, 1.0)
    }

    #[test]
    fn remark_map_images() {
        let m = IntervalMap::zero_to_x(unit());
        assert_eq!(m.image(&0.5).unwrap(), Image::Interval(Interval::new(0.0, 0.5)));
        assert!(m.member(&0.5, &0.2).unwrap());
        assert!(!m.member(&0.5, &0.7).unwrap());
        assert!(matches!(m.image(&1.5), Err(Error::PointOutsideUniverse { .. })));
    }

    #[test]
    fn extensional_images() {
        let m = ExtensionalMap::new(vec![vec![0], vec![]]).unwrap();
        assert_eq!(m.image(&0).unwrap(), Image::Finite(vec![0]));
        assert!(m.image(&1).unwrap().is_empty());
        assert!(m.image(&2).is_err());
        assert!(ExtensionalMap::new(vec![vec![3]]).is_err());
        let m = ExtensionalMap::new(vec![vec![1, 0, 1], vec![1]]).unwrap();
        assert_eq!(m.image_of(0), &[0, 1]);
    }

    #[test]
    fn extensional_json() {
        let s = FiniteQuasiMetricSpace::from_json(r#"{"points": ["a", "b"], "matrix": [[0, 1], [1, 0]]}"#).unwrap();
        let m = ExtensionalMap::from_json(r#"{"images": {"a": ["a", "b"], "b": []}}"#, &s).unwrap();
        assert_eq!(m.images(), &[vec![0, 1], vec![]]);
        let back = ExtensionalMap::from_json(&m.to_json(&s).to_string(), &s).unwrap();
        assert_eq!(back, m);
        assert!(ExtensionalMap::from_json(r#"{"images": {"c": []}}"#, &s).is_err());
    }

    #[test]
    fn predicate_map_requires_sampler() {
        let m = PredicateMap::new(|x: &f64| (0.0..=1.0).contains(x), |x: &f64, u: &f64| u <= x);
        assert!(matches!(m.image(&0.5), Err(Error::ImageNotComputable(_))));
        assert!(m.member(&0.5, &0.25).unwrap());
        let m = m.with_sampler(|_| vec![0.0, 0.25, 0.75]);
        assert_eq!(m.image(&0.5).unwrap(), Image::Sampled(vec![0.0, 0.25]));
    }

    #[test]
    fn identity_map() {
        let s = ScalarSpace::new(BuiltinMetric::Remark46);
        let m = IdentityMap::new(s);
        assert_eq!(m.image(&0.3).unwrap().exact_members(), Some(vec![0.3]));
        assert!(m.member(&0.3, &0.3).unwrap());
        assert!(!m.member(&0.3, &0.2).unwrap());
    }

    #[test]
    fn descent_map_on_remark_grid() {
        let s = ScalarSpace::new(BuiltinMetric::Remark46);
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let m = DescentMap::new(s, |x: &f64| *x, 1.0).unwrap().with_candidates(grid.clone());
        let im = m.image(&0.5).unwrap();
        let members = im.listed().unwrap();
        for &u in &grid {
            let expect = u <= 0.5;
            assert_eq!(members.contains(&u), expect, "u = {u}");
        }
        assert!(!im.is_exact());
        assert!(DescentMap::new(ScalarSpace::new(BuiltinMetric::Remark46), |x: &f64| *x, 0.0).is_err());
    }

    #[test]
    fn descent_map_constant_objective() {
        let s = FiniteQuasiMetricSpace::from_matrix(vec![
            vec![0.0, 0.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let m = DescentMap::new(s.clone(), |_: &usize| 3.0, 2.0).unwrap();
        for x in 0..3 {
            let expect: Vec<usize> = (0..3).filter(|&u| s.d(x, u) == 0.0).collect();
            assert_eq!(m.image(&x).unwrap(), Image::Finite(expect));
        }
    }
}
