use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::maps::{ExtensionalMap, IntervalMap, PredicateMap};
use crate::diagnostics::{ConditionEntry, ConditionReport, Mode, System, Witness};
use crate::error::{Error, Result};
use crate::qspace::{FiniteQuasiMetricSpace, Interval, PointValue};

/// A binary relation `u ⪯ x` intended to be a preorder.
pub trait Preorder: Send + Sync {
    type Point: PointValue;

    fn related(&self, u: &Self::Point, x: &Self::Point) -> Result<bool>;
}

/// A relation on `{0, .., n-1}` stored as a boolean matrix, `rel[u][x] = u ⪯ x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePreorder {
    rel: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct PreorderDoc {
    points: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    #[serde(default)]
    closure: bool,
}

impl FinitePreorder {
    /// Takes the relation as given; use [`FinitePreorder::check`] to verify it.
    pub fn from_matrix(rel: Vec<Vec<bool>>) -> Result<Self> {
        let n = rel.len();
        if let Some(i) = rel.iter().position(|r| r.len() != n) {
            return Err(Error::MalformedMatrix(format!("relation row {i} has the wrong length")));
        }
        Ok(FinitePreorder { rel })
    }

    /// Relation generated by `edges` (`(u, x)` meaning `u ⪯ x`), optionally
    /// closed reflexively and transitively.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], closure: bool) -> Result<Self> {
        let mut rel = vec![vec![false; n]; n];
        for &(u, x) in edges {
            if u >= n || x >= n {
                return Err(Error::PointOutsideUniverse {
                    point: u.max(x).to_string(),
                });
            }
            rel[u][x] = true;
        }
        let mut p = FinitePreorder { rel };
        if closure {
            p.close();
        }
        Ok(p)
    }

    /// Loads `{"points": [...], "edges": [["u", "x"], ...], "closure": true}`.
    pub fn from_json(text: &str) -> Result<(Vec<String>, Self)> {
        let doc: PreorderDoc = serde_json::from_str(text)?;
        let idx = |l: &str| {
            doc.points
                .iter()
                .position(|p| p == l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        };
        let edges = doc
            .edges
            .iter()
            .map(|(u, x)| Ok((idx(u)?, idx(x)?)))
            .collect::<Result<Vec<_>>>()?;
        let p = Self::from_edges(doc.points.len(), &edges, doc.closure)?;
        Ok((doc.points, p))
    }

    pub fn to_json(&self, labels: &[String]) -> Value {
        let n = self.len();
        let edges: Vec<(String, String)> = (0..n)
            .flat_map(|u| (0..n).map(move |x| (u, x)))
            .filter(|&(u, x)| self.rel[u][x])
            .map(|(u, x)| (labels[u].clone(), labels[x].clone()))
            .collect();
        serde_json::to_value(PreorderDoc {
            points: labels.to_vec(),
            edges,
            closure: false,
        })
        .expect("preorder serializes")
    }

    /// Reflexive-transitive closure (Warshall).
    pub fn close(&mut self) {
        let n = self.len();
        for i in 0..n {
            self.rel[i][i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if self.rel[i][k] {
                    for j in 0..n {
                        if self.rel[k][j] {
                            self.rel[i][j] = true;
                        }
                    }
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    #[inline]
    pub fn le(&self, u: usize, x: usize) -> bool {
        self.rel[u][x]
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.rel
    }

    /// `S(x) = {u : u ⪯ x}`.
    pub fn level_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.rel[u][x]).collect()
    }

    /// The level-set map `S` as an extensional map.
    pub fn level_set_map(&self) -> ExtensionalMap {
        ExtensionalMap::new((0..self.len()).map(|x| self.level_set(x)).collect())
            .expect("level sets are in range")
    }

    /// Points of `among` with nothing strictly below them inside `among`.
    pub fn minimal_points(&self, among: &[usize]) -> Vec<usize> {
        among
            .iter()
            .copied()
            .filter(|&m| {
                among
                    .iter()
                    .all(|&u| u == m || !self.rel[u][m] || self.rel[m][u])
            })
            .collect()
    }

    /// Exact check of reflexivity and transitivity; antisymmetry is
    /// reported as informational.
    pub fn check(&self) -> ConditionReport {
        let n = self.len();
        let refl = (0..n)
            .find(|&x| !self.rel[x][x])
            .map(|x| Witness::new("x is not related to itself").points([Value::from(x)]));
        let mut trans = None;
        'outer: for a in 0..n {
            for b in 0..n {
                if !self.rel[a][b] {
                    continue;
                }
                for c in 0..n {
                    if self.rel[b][c] && !self.rel[a][c] {
                        trans = Some(
                            Witness::new("a ⪯ b and b ⪯ c but not a ⪯ c")
                                .points([Value::from(a), Value::from(b), Value::from(c)]),
                        );
                        break 'outer;
                    }
                }
            }
        }
        let anti = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .find(|&(a, b)| a != b && self.rel[a][b] && self.rel[b][a])
            .map(|(a, b)| Witness::new("a ⪯ b and b ⪯ a with a != b").points([Value::from(a), Value::from(b)]));
        let entry = |label: &str, w: Option<Witness>| {
            ConditionEntry::from_check(label, Mode::Exact, 0.0, w.map_or(Ok(()), Err))
        };
        ConditionReport::new(
            System::Preorder,
            vec![entry("reflexivity", refl), entry("transitivity", trans)],
        )
        .with_informational(vec![entry("antisymmetry", anti)])
    }
}

impl Preorder for FinitePreorder {
    type Point = usize;

    fn related(&self, u: &usize, x: &usize) -> Result<bool> {
        let n = self.len();
        for p in [u, x] {
            if *p >= n {
                return Err(Error::PointOutsideUniverse { point: p.to_string() });
            }
        }
        Ok(self.rel[*u][*x])
    }
}

/// The usual orders on a real interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RealOrder {
    /// `u ⪯ x` iff `u <= x`.
    LessEq(Interval),
    /// `u ⪯ x` iff `u >= x`.
    GreaterEq(Interval),
}

impl RealOrder {
    pub fn universe(&self) -> Interval {
        match self {
            RealOrder::LessEq(iv) | RealOrder::GreaterEq(iv) => *iv,
        }
    }

    /// `S(x) = (-∞, x]` resp. `[x, ∞)`, clipped to the universe.
    pub fn level_set_map(&self) -> IntervalMap {
        match *self {
            RealOrder::LessEq(iv) => IntervalMap::lower_set(iv),
            RealOrder::GreaterEq(iv) => IntervalMap::upper_set(iv),
        }
    }
}

impl Preorder for RealOrder {
    type Point = f64;

    fn related(&self, u: &f64, x: &f64) -> Result<bool> {
        let iv = self.universe();
        for p in [u, x] {
            if !iv.contains(*p) {
                return Err(Error::PointOutsideUniverse { point: p.to_string() });
            }
        }
        Ok(match self {
            RealOrder::LessEq(_) => u <= x,
            RealOrder::GreaterEq(_) => u >= x,
        })
    }
}

type RelationFn<P> = Arc<dyn Fn(&P, &P) -> bool + Send + Sync>;
type SamplerFn<P> = Arc<dyn Fn(&P) -> Vec<P> + Send + Sync>;

/// A preorder given by an arbitrary relation test.
#[derive(Clone)]
pub struct RelationPreorder<P> {
    domain: Arc<dyn Fn(&P) -> bool + Send + Sync>,
    rel: RelationFn<P>,
    sampler: Option<SamplerFn<P>>,
}

impl<P> fmt::Debug for RelationPreorder<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelationPreorder").finish_non_exhaustive()
    }
}

impl<P: PointValue + 'static> RelationPreorder<P> {
    pub fn new(
        domain: impl Fn(&P) -> bool + Send + Sync + 'static,
        rel: impl Fn(&P, &P) -> bool + Send + Sync + 'static,
    ) -> Self {
        RelationPreorder {
            domain: Arc::new(domain),
            rel: Arc::new(rel),
            sampler: None,
        }
    }

    pub fn with_sampler(mut self, sampler: impl Fn(&P) -> Vec<P> + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    pub fn level_set_map(&self) -> PredicateMap<P> {
        let domain = self.domain.clone();
        let rel = self.rel.clone();
        let m = PredicateMap::new(move |x| domain(x), move |x, u| rel(u, x));
        match &self.sampler {
            Some(s) => {
                let s = s.clone();
                m.with_sampler(move |x| s(x))
            }
            None => m,
        }
    }

    /// Reflexivity and transitivity on the given points (sampled verdicts).
    pub fn check_on(&self, points: &[P]) -> ConditionReport {
        let refl = points.iter().find(|x| !(self.rel)(x, x)).map(|x| {
            Witness::new("x is not related to itself").points([serde_json::to_value(x).unwrap_or(Value::Null)])
        });
        let mut trans = None;
        'outer: for a in points {
            for b in points {
                if !(self.rel)(a, b) {
                    continue;
                }
                for c in points {
                    if (self.rel)(b, c) && !(self.rel)(a, c) {
                        let v = |p: &P| serde_json::to_value(p).unwrap_or(Value::Null);
                        trans = Some(Witness::new("a ⪯ b and b ⪯ c but not a ⪯ c").points([v(a), v(b), v(c)]));
                        break 'outer;
                    }
                }
            }
        }
        let entry = |label: &str, w: Option<Witness>| {
            ConditionEntry::from_check(label, Mode::Sampled, 0.0, w.map_or(Ok(()), Err))
        };
        ConditionReport::new(
            System::Preorder,
            vec![entry("reflexivity", refl), entry("transitivity", trans)],
        )
    }
}

impl<P: PointValue> Preorder for RelationPreorder<P> {
    type Point = P;

    fn related(&self, u: &P, x: &P) -> Result<bool> {
        for p in [u, x] {
            if !(self.domain)(p) {
                return Err(Error::PointOutsideUniverse {
                    point: format!("{p:?}"),
                });
            }
        }
        Ok((self.rel)(u, x))
    }
}

/// An extended real `ℝ ∪ {±∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    fn rank(self) -> (i8, f64) {
        match self {
            ExtReal::NegInf => (-1, 0.0),
            ExtReal::Finite(v) => (0, v),
            ExtReal::PosInf => (1, 0.0),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, b) = (self.rank(), other.rank());
        match a.0.cmp(&b.0) {
            Ordering::Equal => a.1.partial_cmp(&b.1),
            o => Some(o),
        }
    }
}

type UtilityFn<P> = Arc<dyn Fn(&P) -> ExtReal + Send + Sync>;

/// An extended-real valued function `φ` on the points.
#[derive(Clone)]
pub struct Utility<P> {
    f: UtilityFn<P>,
}

impl<P> fmt::Debug for Utility<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Utility")
    }
}

impl<P: PointValue> Utility<P> {
    pub fn new(f: impl Fn(&P) -> ExtReal + Send + Sync + 'static) -> Self {
        Utility { f: Arc::new(f) }
    }

    pub fn real(f: impl Fn(&P) -> f64 + Send + Sync + 'static) -> Self {
        Utility::new(move |x| ExtReal::from(f(x)))
    }

    pub fn eval(&self, x: &P) -> ExtReal {
        (self.f)(x)
    }

    /// Finds a related pair `u ⪯ x` among `points` with `φ(u) > φ(x)`.
    pub fn monotonicity_violation<O>(&self, order: &O, points: &[P]) -> Result<Option<(P, P)>>
    where
        O: Preorder<Point = P>,
    {
        for u in points {
            for x in points {
                if order.related(u, x)? && self.eval(u).partial_cmp(&self.eval(x)) == Some(Ordering::Greater) {
                    return Ok(Some((u.clone(), x.clone())));
                }
            }
        }
        Ok(None)
    }
}

impl Utility<usize> {
    /// `φ(i) = values[i]`; indices past the table evaluate to `+∞`.
    pub fn from_values(values: Vec<ExtReal>) -> Self {
        Utility::new(move |i: &usize| values.get(*i).copied().unwrap_or(ExtReal::PosInf))
    }
}

/// Reads a finite preorder whose labels match an existing finite space.
pub fn preorder_for_space(text: &str, space: &FiniteQuasiMetricSpace) -> Result<FinitePreorder> {
    let (labels, p) = FinitePreorder::from_json(text)?;
    if labels.as_slice() != space.labels() {
        let missing = labels
            .iter()
            .find(|l| space.index_of(l).is_none())
            .cloned()
            .unwrap_or_else(|| "point order differs from the space".into());
        return Err(Error::UnknownLabel(missing));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Status;
    use crate::setmap::{Image, SetValuedMap};

    fn chain() -> FinitePreorder {
        // a ⪯ b ⪯ c
        FinitePreorder::from_edges(3, &[(0, 1), (1, 2)], true).unwrap()
    }

    #[test]
    fn chain_level_sets() {
        let p = chain();
        let s = p.level_set_map();
        assert_eq!(s.image_of(2), &[0, 1, 2]);
        assert_eq!(s.image_of(0), &[0]);
        assert_eq!(p.check().overall, Status::Holds);
        assert_eq!(p.minimal_points(&[0, 1, 2]), vec![0]);
    }

    #[test]
    fn missing_closure_is_reported() {
        let p = FinitePreorder::from_edges(3, &[(0, 1), (1, 2)], false).unwrap();
        let r = p.check();
        assert_eq!(r.status("reflexivity"), Some(Status::Fails));
        let p = FinitePreorder::from_matrix(vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ])
        .unwrap();
        let w = p.check().get("transitivity").unwrap().witness.clone().unwrap();
        assert_eq!(w.points, vec![Value::from(0), Value::from(1), Value::from(2)]);
    }

    #[test]
    fn preorder_json() {
        let text = r#"{"points": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]], "closure": true}"#;
        let (labels, p) = FinitePreorder::from_json(text).unwrap();
        assert_eq!(p, chain());
        let (_, back) = FinitePreorder::from_json(&p.to_json(&labels).to_string()).unwrap();
        assert_eq!(back, p);
        assert!(FinitePreorder::from_json(r#"{"points": ["a"], "edges": [["a", "z"]]}"#).is_err());
    }

    #[test]
    fn real_order_level_set_is_an_interval() {
        let o = RealOrder::LessEq(Interval::new(f64::NEG_INFINITY, f64::INFINITY));
        let s = o.level_set_map();
        assert_eq!(s.image(&2.0).unwrap(), Image::Interval(Interval::new(f64::NEG_INFINITY, 2.0)));
        assert!(o.related(&1.0, &2.0).unwrap());
        let o = RealOrder::GreaterEq(Interval::new(0.0, 1.0));
        assert_eq!(o.level_set_map().image(&0.25).unwrap(), Image::Interval(Interval::new(0.25, 1.0)));
    }

    #[test]
    fn partial_preorder_minimal_points() {
        // 0 and 1 equivalent, both below 2; 3 unrelated
        let p = FinitePreorder::from_edges(4, &[(0, 1), (1, 0), (1, 2)], true).unwrap();
        assert_eq!(p.minimal_points(&[0, 1, 2, 3]), vec![0, 1, 3]);
        assert_eq!(p.check().status("antisymmetry"), Some(Status::Fails));
    }

    #[test]
    fn extended_reals_order() {
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert_eq!(ExtReal::from(f64::INFINITY), ExtReal::PosInf);
        assert!(ExtReal::Finite(1.0) < ExtReal::Finite(2.0));
    }

    #[test]
    fn utility_monotonicity() {
        let p = chain();
        let good = Utility::from_values(vec![0.0.into(), 1.0.into(), 2.0.into()]);
        assert_eq!(good.monotonicity_violation(&p, &[0, 1, 2]).unwrap(), None);
        let bad = Utility::from_values(vec![0.0.into(), 3.0.into(), 2.0.into()]);
        assert_eq!(bad.monotonicity_violation(&p, &[0, 1, 2]).unwrap(), Some((1, 2)));
    }

    #[test]
    fn relation_preorder_level_sets() {
        let o = RelationPreorder::new(|x: &f64| (0.0..=1.0).contains(x), |u: &f64, x: &f64| u <= x)
            .with_sampler(|_| vec![0.0, 0.5, 1.0]);
        let s = o.level_set_map();
        assert_eq!(s.image(&0.5).unwrap(), Image::Sampled(vec![0.0, 0.5]));
        assert_eq!(o.check_on(&[0.0, 0.5, 1.0]).overall, Status::Holds);
    }
}
