use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::rule::{select_next, Selection, SelectionRule};
use crate::diagnostics::{check_e_conditions, CheckOptions, ConditionReport};
use crate::error::{Error, Result};
use crate::qspace::QuasiMetric;
use crate::setmap::{ExtReal, Image, SetValuedMap, DEFAULT_GRID};

/// Step budget and tolerances for a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum number of selection steps.
    pub budget: usize,
    pub gap_tol: f64,
    /// Forward-limit tolerance used to accept candidates and in the E-report.
    pub epsilon: f64,
    pub grid: usize,
}

impl SearchConfig {
    pub fn finite() -> Self {
        SearchConfig {
            budget: 1000,
            gap_tol: 0.0,
            epsilon: 0.0,
            grid: DEFAULT_GRID,
        }
    }

    pub fn continuous() -> Self {
        SearchConfig {
            gap_tol: 1e-9,
            epsilon: 1e-6,
            ..Self::finite()
        }
    }

    pub fn for_space<S: QuasiMetric + ?Sized>(space: &S) -> Self {
        if space.points().is_some() {
            Self::finite()
        } else {
            Self::continuous()
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::param("budget", "must be at least 1"));
        }
        if !(self.gap_tol >= 0.0) {
            return Err(Error::param("gap_tol", "must be nonnegative"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::param("epsilon", "must be nonnegative"));
        }
        Ok(())
    }

    fn check_options(&self, space_listed: bool) -> CheckOptions {
        let base = if space_listed {
            CheckOptions::finite()
        } else {
            CheckOptions::continuous()
        };
        CheckOptions {
            tol: self.gap_tol,
            limit_eps: self.epsilon,
            grid: self.grid,
            ..base
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    EmptyImage,
    GapTolerance,
    Budget,
}

/// One entry of a trace; `step_dist` and `slack` refer to the move to the
/// next point and are absent at the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub step_dist: Option<f64>,
    pub sup_gap: Option<f64>,
    pub sup_exact: bool,
    pub slack: Option<f64>,
    /// `φ(x_n) - inf φ(Φ(x_{n-1}))` on near-inf runs.
    pub inf_gap: Option<f64>,
}

/// A finite generalized Picard sequence with per-step data.
#[derive(Clone, Debug)]
pub struct PicardTrace<P> {
    pub points: Vec<P>,
    pub steps: Vec<StepRecord>,
    pub rule: String,
    pub tie_break: String,
    pub termination: Termination,
}

impl<P: crate::qspace::PointValue> PicardTrace<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> &P {
        self.points.last().expect("traces hold at least x0")
    }

    pub fn residual_gap(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.sup_gap)
    }

    /// One JSON object per line: `n`, `x`, `step_dist`, `sup_gap`, `slack`,
    /// plus `inf_gap` on near-inf runs.
    pub fn to_jsonl<S: QuasiMetric<Point = P> + ?Sized>(&self, space: &S) -> String {
        let mut out = String::new();
        for (x, s) in self.points.iter().zip(&self.steps) {
            let mut rec = json!({
                "n": s.n,
                "x": space.point_to_json(x),
                "step_dist": s.step_dist,
                "sup_gap": s.sup_gap,
                "slack": s.slack,
            });
            if let Some(g) = s.inf_gap {
                rec["inf_gap"] = json!(g);
            }
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        out
    }
}

/// Reads the points of a JSON-lines trace, in file order.
pub fn points_from_jsonl<S: QuasiMetric + ?Sized>(text: &str, space: &S) -> Result<Vec<S::Point>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Value = serde_json::from_str(l)?;
            let x = v
                .get("x")
                .ok_or_else(|| Error::param("trace", format!("record without \"x\": {l}")))?;
            space.point_from_json(x)
        })
        .collect()
}

fn wrap(step: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::Selection { .. } => e,
        e => Error::Selection {
            step,
            source: Box::new(e),
        },
    }
}

struct Runner<'a, S: QuasiMetric + ?Sized, M: ?Sized> {
    map: &'a M,
    space: &'a S,
    rule: &'a SelectionRule<S::Point>,
    cfg: SearchConfig,
    trace: PicardTrace<S::Point>,
    last_inf: Option<f64>,
}

impl<'a, S, M> Runner<'a, S, M>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    fn new(map: &'a M, space: &'a S, x0: &S::Point, rule: &'a SelectionRule<S::Point>, cfg: SearchConfig) -> Result<Self> {
        cfg.validate()?;
        if !space.contains(x0) {
            return Err(crate::qspace::outside(space, x0));
        }
        let mut r = Runner {
            map,
            space,
            rule,
            cfg,
            trace: PicardTrace {
                points: Vec::new(),
                steps: Vec::new(),
                rule: rule.name(),
                tie_break: rule.tie_break().into(),
                termination: Termination::Budget,
            },
            last_inf: None,
        };
        r.push(x0.clone())?;
        Ok(r)
    }

    fn push(&mut self, x: S::Point) -> Result<()> {
        let n = self.trace.points.len();
        let image = self.map.image(&x).map_err(wrap(n))?;
        let sup = image.sup_distance(self.space, &x, self.cfg.grid).map_err(wrap(n))?;
        let inf_gap = match (self.rule, self.last_inf) {
            (SelectionRule::NearInf { utility, .. }, Some(inf)) => match utility.eval(&x) {
                ExtReal::Finite(v) => Some(v - inf),
                _ => None,
            },
            _ => None,
        };
        self.trace.steps.push(StepRecord {
            n,
            step_dist: None,
            sup_gap: Some(sup.value),
            sup_exact: sup.exact,
            slack: None,
            inf_gap,
        });
        self.trace.points.push(x);
        Ok(())
    }

    fn image_empty(&self) -> Result<bool> {
        let n = self.trace.points.len() - 1;
        Ok(self.map.image(self.trace.last()).map_err(wrap(n))?.is_empty())
    }

    /// Takes one selection step; `false` when the image is empty.
    fn step(&mut self) -> Result<bool> {
        let n = self.trace.points.len() - 1;
        let x = self.trace.last().clone();
        match select_next(self.map, self.space, &x, self.rule, n, self.cfg.grid).map_err(wrap(n))? {
            Selection::Stop => Ok(false),
            Selection::Next { point, bound, .. } => {
                let d = self.space.distance(&x, &point).map_err(wrap(n))?;
                let rec = self.trace.steps.last_mut().expect("nonempty");
                rec.step_dist = Some(d);
                rec.slack = self.rule.slack(n);
                self.last_inf = match self.rule {
                    SelectionRule::NearInf { .. } => bound,
                    _ => None,
                };
                self.push(point)?;
                Ok(true)
            }
        }
    }

    fn steps_taken(&self) -> usize {
        self.trace.points.len() - 1
    }

    fn gap_small(&self) -> bool {
        self.steps_taken() >= 1 && self.trace.residual_gap().is_some_and(|g| g <= self.cfg.gap_tol)
    }
}

/// Runs the selection rule from `x0`.
///
/// At least one step is taken unless `Φ(x0)` is empty; afterwards the run
/// stops at an empty image, at the first point whose sup-gap is within
/// `gap_tol`, or after `budget` steps.
pub fn iterate<S, M>(map: &M, space: &S, x0: &S::Point, rule: &SelectionRule<S::Point>, cfg: &SearchConfig) -> Result<PicardTrace<S::Point>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let mut r = Runner::new(map, space, x0, rule, *cfg)?;
    loop {
        if r.image_empty()? {
            r.trace.termination = Termination::EmptyImage;
            break;
        }
        if r.gap_small() {
            r.trace.termination = Termination::GapTolerance;
            break;
        }
        if r.steps_taken() >= cfg.budget {
            r.trace.termination = Termination::Budget;
            break;
        }
        if !r.step()? {
            r.trace.termination = Termination::EmptyImage;
            break;
        }
    }
    Ok(r.trace)
}

/// How `Φ(x̄)` relates to `{x̄}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Classification<P> {
    /// `Φ(x̄) = {x̄}`.
    Invariant,
    /// `Φ(x̄) = ∅`.
    Nonvariant,
    /// A member of `Φ(x̄)` other than `x̄`.
    Neither(P),
}

impl<P> Classification<P> {
    /// `Φ(x̄) ⊆ {x̄}`.
    pub fn is_nonvariant(&self) -> bool {
        !matches!(self, Classification::Neither(_))
    }
}

pub fn classify_point<S, M>(map: &M, space: &S, xbar: &S::Point) -> Result<Classification<S::Point>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    if !space.contains(xbar) {
        return Err(crate::qspace::outside(space, xbar));
    }
    let image = map.image(xbar)?;
    let members: Vec<S::Point> = match &image {
        Image::Sampled(_) => {
            return Err(Error::UnrepresentableImage(format!(
                "image of {} is only sampled",
                space.describe(xbar)
            )))
        }
        Image::Finite(v) => v.clone(),
        Image::Interval(iv) => {
            let iv = match space.scalar_extent() {
                Some(ext) => iv.intersect(&ext),
                None => *iv,
            };
            if iv.is_empty() {
                Vec::new()
            } else {
                let ends = if iv.lo == iv.hi { vec![iv.lo] } else { vec![iv.lo, iv.hi] };
                ends.into_iter()
                    .map(|t| {
                        crate::qspace::PointValue::from_scalar(t)
                            .ok_or_else(|| Error::UnrepresentableImage("interval image over non-scalar points".into()))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        }
    };
    if members.is_empty() {
        return Ok(Classification::Nonvariant);
    }
    Ok(match members.into_iter().find(|u| u != xbar) {
        Some(u) => Classification::Neither(u),
        None => Classification::Invariant,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<P> {
    InvariantPoint(P),
    NonvariantPoint(P),
    BudgetExhausted { best: P, residual_gap: Option<f64> },
    /// The sup-gap vanished but no candidate limit was nonvariant; the
    /// attached E-report shows which hypothesis broke.
    ConditionViolation { best: P, residual_gap: Option<f64> },
}

impl<P> Outcome<P> {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::InvariantPoint(_) => "invariant_point",
            Outcome::NonvariantPoint(_) => "nonvariant_point",
            Outcome::BudgetExhausted { .. } => "budget_exhausted",
            Outcome::ConditionViolation { .. } => "condition_violation",
        }
    }

    pub fn point(&self) -> Option<&P> {
        match self {
            Outcome::InvariantPoint(p) | Outcome::NonvariantPoint(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult<P> {
    pub trace: PicardTrace<P>,
    pub outcome: Outcome<P>,
    pub report: ConditionReport,
}

impl<P: crate::qspace::PointValue> SearchResult<P> {
    pub fn to_json<S: QuasiMetric<Point = P> + ?Sized>(&self, space: &S) -> Value {
        let mut outcome = json!({ "kind": self.outcome.kind() });
        match &self.outcome {
            Outcome::InvariantPoint(p) | Outcome::NonvariantPoint(p) => outcome["point"] = space.point_to_json(p),
            Outcome::BudgetExhausted { best, residual_gap } | Outcome::ConditionViolation { best, residual_gap } => {
                outcome["best"] = space.point_to_json(best);
                outcome["residual_gap"] = json!(residual_gap);
            }
        }
        json!({
            "outcome": outcome,
            "steps": self.trace.len() - 1,
            "termination": self.trace.termination,
            "rule": self.trace.rule,
            "tie_break": self.trace.tie_break,
            "report": self.report,
        })
    }
}

/// Searches for a nonvariant point from `x0`.
pub fn find_invariant_point<S, M>(map: &M, space: &S, x0: &S::Point, rule: &SelectionRule<S::Point>, cfg: &SearchConfig) -> Result<SearchResult<S::Point>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    find_invariant_point_from(map, space, x0, rule, cfg, &[])
}

/// Like [`find_invariant_point`], with extra limit candidates.
///
/// Whenever the sup-gap falls within `gap_tol` the candidates are the last
/// point, then `candidates`, then the exactly listed points of `∩ Φ(x_n)`;
/// each must lie in every image along the trace and satisfy
/// `q(x_N, y) <= epsilon`. The first nonvariant one ends the search. If none
/// qualifies the run continues until the budget is spent.
pub fn find_invariant_point_from<S, M>(
    map: &M,
    space: &S,
    x0: &S::Point,
    rule: &SelectionRule<S::Point>,
    cfg: &SearchConfig,
    candidates: &[S::Point],
) -> Result<SearchResult<S::Point>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let mut r = Runner::new(map, space, x0, rule, *cfg)?;
    let mut gap_stops = 0usize;
    let outcome = loop {
        if r.image_empty()? {
            r.trace.termination = Termination::EmptyImage;
            break Outcome::NonvariantPoint(r.trace.last().clone());
        }
        if r.gap_small() {
            gap_stops += 1;
            r.trace.termination = Termination::GapTolerance;
            if let Some((y, c)) = accept_limit(map, space, &r.trace.points, candidates, cfg)? {
                break match c {
                    Classification::Invariant => Outcome::InvariantPoint(y),
                    _ => Outcome::NonvariantPoint(y),
                };
            }
        }
        if r.steps_taken() >= cfg.budget {
            r.trace.termination = Termination::Budget;
            let best = r.trace.last().clone();
            let residual_gap = r.trace.residual_gap();
            break if gap_stops > 0 {
                Outcome::ConditionViolation { best, residual_gap }
            } else {
                Outcome::BudgetExhausted { best, residual_gap }
            };
        }
        if !r.step()? {
            r.trace.termination = Termination::EmptyImage;
            break Outcome::NonvariantPoint(r.trace.last().clone());
        }
    };
    let trace = r.trace;
    let opts = cfg.check_options(space.points().is_some());
    let report = check_e_conditions(&trace.points, map, space, outcome.point(), candidates, &opts)?;
    Ok(SearchResult { trace, outcome, report })
}

fn accept_limit<S, M>(map: &M, space: &S, trace: &[S::Point], candidates: &[S::Point], cfg: &SearchConfig) -> Result<Option<(S::Point, Classification<S::Point>)>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let last = trace.last().expect("nonempty");
    let mut pool = vec![last.clone()];
    pool.extend(candidates.iter().cloned());
    let mut meet = map.image(&trace[0])?;
    let mut exact = meet.is_exact();
    for x in &trace[1..] {
        match meet.intersect(&map.image(x)?) {
            Ok(i) => meet = i,
            Err(_) => {
                exact = false;
                break;
            }
        }
    }
    if let Some(members) = meet.exact_members().filter(|_| exact) {
        pool.extend(members);
    }
    let mut seen: Vec<S::Point> = Vec::new();
    'pool: for y in pool {
        if seen.contains(&y) || !space.contains(&y) {
            continue;
        }
        seen.push(y.clone());
        if space.distance(last, &y)? > cfg.epsilon {
            continue;
        }
        for x in trace {
            if !map.member(x, &y)? {
                continue 'pool;
            }
        }
        match classify_point(map, space, &y) {
            Ok(c) if c.is_nonvariant() => return Ok(Some((y, c))),
            Ok(_) | Err(Error::UnrepresentableImage(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Status;
    use crate::qspace::{BuiltinMetric, FiniteQuasiMetricSpace, Interval, ScalarSpace};
    use crate::setmap::{ExtensionalMap, FinitePreorder, IdentityMap, IntervalMap, Utility};

    fn remark() -> (ScalarSpace, IntervalMap) {
        (
            ScalarSpace::new(BuiltinMetric::Remark46),
            IntervalMap::zero_to_x(Interval::new(0.0, 1.0)),
        )
    }

    fn chain5() -> (FiniteQuasiMetricSpace, ExtensionalMap) {
        // rank metric on 0..5 with Φ(i) = {0, .., i}
        let m: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| (i as f64 - j as f64).abs()).collect()).collect();
        let s = FiniteQuasiMetricSpace::from_matrix(m).unwrap();
        let map = ExtensionalMap::new((0..5).map(|i| (0..=i).collect()).collect()).unwrap();
        (s, map)
    }

    #[test]
    fn remark_from_one() {
        let (s, m) = remark();
        let t = iterate(&m, &s, &1.0, &SelectionRule::near_sup(), &SearchConfig::continuous()).unwrap();
        assert_eq!(t.points, vec![1.0, 0.0]);
        assert_eq!(t.termination, Termination::GapTolerance);
        assert_eq!(t.steps[0].sup_gap, Some(1.0));
        assert_eq!(t.steps[1].sup_gap, Some(0.0));

        let r = find_invariant_point(&m, &s, &1.0, &SelectionRule::near_sup(), &SearchConfig::continuous()).unwrap();
        assert_eq!(r.outcome, Outcome::InvariantPoint(0.0));
        assert_eq!(classify_point(&m, &s, &0.0).unwrap(), Classification::Invariant);
    }

    #[test]
    fn classify_remark_points() {
        let (s, m) = remark();
        match classify_point(&m, &s, &0.5).unwrap() {
            Classification::Neither(u) => assert!(m.member(&0.5, &u).unwrap() && u != 0.5),
            c => panic!("{c:?}"),
        }
        let e = ExtensionalMap::new(vec![vec![], vec![1]]).unwrap();
        let f = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(classify_point(&e, &f, &0).unwrap(), Classification::Nonvariant);
    }

    #[test]
    fn identity_takes_one_step() {
        let s = ScalarSpace::new(BuiltinMetric::OneSidedDiff);
        let m = IdentityMap::new(s.clone());
        let r = find_invariant_point(&m, &s, &2.5, &SelectionRule::near_sup(), &SearchConfig::continuous()).unwrap();
        assert_eq!(r.trace.points, vec![2.5, 2.5]);
        assert_eq!(r.outcome, Outcome::InvariantPoint(2.5));
    }

    #[test]
    fn chain_descends_with_decreasing_gaps() {
        let (s, m) = chain5();
        let t = iterate(&m, &s, &4, &SelectionRule::near_sup(), &SearchConfig::finite()).unwrap();
        // oracle: the farthest point of {0, .., 4} from 4 is 0, and Φ(0) = {0}
        let far = (0..=4usize).max_by(|a, b| s.d(4, *a).total_cmp(&s.d(4, *b))).unwrap();
        assert_eq!(t.points, vec![4, far]);
        let gaps: Vec<f64> = t.steps.iter().map(|r| r.sup_gap.unwrap()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn near_sup_contract_and_jsonl() {
        let (s, m) = remark();
        let rule = SelectionRule::near_sup();
        let t = iterate(&m, &s, &0.8, &rule, &SearchConfig::continuous()).unwrap();
        for r in &t.steps[..t.len() - 1] {
            assert!(r.sup_gap.unwrap() - r.step_dist.unwrap() <= r.slack.unwrap());
        }
        let text = t.to_jsonl(&s);
        let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first, json!({"n": 0, "x": 0.8, "step_dist": 0.8, "sup_gap": 0.8, "slack": 1.0}));
        assert_eq!(points_from_jsonl(&text, &s).unwrap(), t.points);
    }

    #[test]
    fn empty_image_is_nonvariant() {
        let s = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = ExtensionalMap::new(vec![vec![1], vec![]]).unwrap();
        let r = find_invariant_point(&m, &s, &0, &SelectionRule::near_sup(), &SearchConfig::finite()).unwrap();
        assert_eq!(r.outcome, Outcome::NonvariantPoint(1));
        assert_eq!(r.trace.termination, Termination::EmptyImage);
    }

    #[test]
    fn cycling_exhausts_budget() {
        let s = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = ExtensionalMap::new(vec![vec![1], vec![0]]).unwrap();
        let r = find_invariant_point(&m, &s, &0, &SelectionRule::near_sup(), &SearchConfig::finite().with_budget(7)).unwrap();
        assert_eq!(r.outcome.kind(), "budget_exhausted");
        assert_eq!(r.trace.len(), 8);
        assert_eq!(r.report.status("E3"), Some(Status::Fails));
    }

    #[test]
    fn zero_distance_pair_moves_on() {
        // q(0, 1) = 0, Φ(0) = {0, 1}, Φ(1) = {1}: 0 is not nonvariant but 1 is
        let s = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let m = ExtensionalMap::new(vec![vec![0, 1], vec![1]]).unwrap();
        let r = find_invariant_point(&m, &s, &0, &SelectionRule::near_sup(), &SearchConfig::finite()).unwrap();
        assert_eq!(r.outcome, Outcome::InvariantPoint(1));
    }

    #[test]
    fn near_inf_reaches_minimal_point() {
        let p = FinitePreorder::from_edges(3, &[(0, 1), (1, 2)], true).unwrap();
        let phi = Utility::real(|i: &usize| *i as f64);
        let s = crate::setmap::utility_pseudometric(&phi, &[0, 1, 2]).unwrap();
        let r = find_invariant_point(&p.level_set_map(), &s, &2, &SelectionRule::near_inf(phi), &SearchConfig::finite()).unwrap();
        assert_eq!(r.outcome, Outcome::InvariantPoint(0));
        assert_eq!(r.trace.steps[1].inf_gap, Some(0.0));
    }

    #[test]
    fn summary_json() {
        let (s, m) = remark();
        let r = find_invariant_point(&m, &s, &1.0, &SelectionRule::near_sup(), &SearchConfig::continuous()).unwrap();
        let j = r.to_json(&s);
        assert_eq!(j["outcome"], json!({"kind": "invariant_point", "point": 0.0}));
        assert_eq!(j["steps"], json!(1));
        assert_eq!(j["termination"], json!("gap_tolerance"));
        assert_eq!(j["report"]["system"], json!("E"));
    }

    #[test]
    fn zero_budget_is_rejected() {
        let (s, m) = remark();
        assert!(iterate(&m, &s, &1.0, &SelectionRule::near_sup(), &SearchConfig::continuous().with_budget(0)).is_err());
    }
}
