//! Checkers for the named condition systems.
//!
//! Verdicts are exact when the universe can be enumerated and every image
//! involved is exact; otherwise they are computed on the supplied traces and
//! candidate points and labelled sampled. Limits along a finite trace are
//! read off its tail window (see [`CheckOptions`]).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::finite_graph::{PicardGraph, MAX_EXACT_POINTS};
use super::report::{ConditionEntry, ConditionReport, Mode, System, Witness};
use super::sequence::DEFAULT_WINDOW;
use crate::error::{Error, Result};
use crate::qspace::{Interval, QuasiMetric};
use crate::setmap::{ExtReal, Image, Inclusion, Preorder, SetValuedMap, SupValue, TauFunction, Utility, DEFAULT_GRID};

/// Tolerances shared by the checkers.
///
/// The tail window of a trace of length `L` is its last `min(window, L - 1)`
/// entries (one entry when `L = 1`). A sup-gap vanishes when it is at most
/// `tol` at every window entry; `y` is a detected forward limit when
/// `q(x_n, y) <= limit_eps` at every window entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub tol: f64,
    pub limit_eps: f64,
    pub window: usize,
    /// Grid size for sups over interval images without a closed form.
    pub grid: usize,
    /// Points per interval image when an inclusion has to be probed.
    pub probe: usize,
}

impl CheckOptions {
    /// Exact comparisons, for finite spaces.
    pub fn finite() -> Self {
        CheckOptions {
            tol: 0.0,
            limit_eps: 0.0,
            window: DEFAULT_WINDOW,
            grid: DEFAULT_GRID,
            probe: 21,
        }
    }

    pub fn continuous() -> Self {
        CheckOptions {
            tol: 1e-6,
            limit_eps: 1e-6,
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

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_limit_eps(mut self, eps: f64) -> Self {
        self.limit_eps = eps;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    /// First index of the tail window of a trace of length `len`.
    pub fn tail_start(&self, len: usize) -> usize {
        let w = if len <= 1 { 1 } else { self.window.max(1).min(len - 1) };
        len.saturating_sub(w)
    }
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self::continuous()
    }
}

fn entry(label: &str, mode: Mode, tol: f64, w: Option<Witness>) -> ConditionEntry {
    ConditionEntry::from_check(label, mode, tol, w.map_or(Ok(()), Err))
}

fn push_unique<P: PartialEq + Clone>(v: &mut Vec<P>, p: &P) {
    if !v.contains(p) {
        v.push(p.clone());
    }
}

/// Errors with the first step where `x_{n+1} ∉ Φ(x_n)`.
pub fn validate_picard<M>(trace: &[M::Point], map: &M) -> Result<()>
where
    M: SetValuedMap + ?Sized,
{
    for (n, w) in trace.windows(2).enumerate() {
        if !map.member(&w[0], &w[1])? {
            return Err(Error::NotPicard { step: n });
        }
    }
    Ok(())
}

/// Images and sup-gaps along a trace.
#[derive(Clone, Debug)]
pub struct TraceData<P> {
    pub images: Vec<Image<P>>,
    pub gaps: Vec<SupValue<P>>,
}

pub fn analyze_trace<S, M>(trace: &[S::Point], map: &M, space: &S, grid: usize) -> Result<TraceData<S::Point>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let images = trace.iter().map(|x| map.image(x)).collect::<Result<Vec<_>>>()?;
    let gaps = trace
        .iter()
        .zip(&images)
        .map(|(x, im)| im.sup_distance(space, x, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceData { images, gaps })
}

/// Points of `pool` lying in every image along the trace, in pool order.
pub fn common_points<M>(trace: &[M::Point], map: &M, pool: &[M::Point]) -> Result<Vec<M::Point>>
where
    M: SetValuedMap + ?Sized,
{
    let mut out = Vec::new();
    'pool: for y in pool {
        for x in trace {
            if !map.member(x, y)? {
                continue 'pool;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Points of `pool` detected as forward limits of the trace.
pub fn forward_limits<S>(trace: &[S::Point], space: &S, pool: &[S::Point], opts: &CheckOptions) -> Result<Vec<S::Point>>
where
    S: QuasiMetric + ?Sized,
{
    let start = opts.tail_start(trace.len());
    let mut out: Vec<S::Point> = Vec::new();
    'pool: for y in pool {
        if out.contains(y) {
            continue;
        }
        for x in &trace[start..] {
            if space.distance(x, y)? > opts.limit_eps {
                continue 'pool;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// `Φ(a) ⊆ Φ(b)`, exact when both images are exact, otherwise probed
/// through membership tests. Returns the verdict, a missing point, and
/// whether the answer is exact.
fn included<M>(map: &M, a: &M::Point, b: &M::Point, ia: &Image<M::Point>, ib: &Image<M::Point>, probe: usize) -> Result<(Option<M::Point>, bool)>
where
    M: SetValuedMap + ?Sized,
{
    match ia.inclusion(ib) {
        Inclusion::Yes => Ok((None, true)),
        Inclusion::No(u) => Ok((Some(u), true)),
        Inclusion::Unknown => {
            let _ = a;
            for u in ia.probe_points(probe) {
                if !map.member(b, &u)? {
                    return Ok((Some(u), false));
                }
            }
            Ok((None, false))
        }
    }
}

/// Checks (E1)–(E5) for a trace and a candidate point `x̄`.
///
/// When `candidate` is `None`, (E3) searches the universe (or, failing that,
/// the trace and `extra` points) for a point common to all images, and (E5)
/// uses the point found. (E4) scans the whole universe when it can be
/// listed and otherwise the trace, `extra` and the candidate.
pub fn check_e_conditions<S, M>(
    trace: &[S::Point],
    map: &M,
    space: &S,
    candidate: Option<&S::Point>,
    extra: &[S::Point],
    opts: &CheckOptions,
) -> Result<ConditionReport>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    if trace.is_empty() {
        return Err(Error::param("trace", "must not be empty"));
    }
    validate_picard(trace, map)?;
    let data = analyze_trace(trace, map, space, opts.grid)?;
    let len = trace.len();
    let pj = |p: &S::Point| space.point_to_json(p);
    let universe = space.points();

    // E1
    let mut e1_exact = true;
    let mut e1 = None;
    for n in 0..len.saturating_sub(1) {
        let (miss, exact) = included(map, &trace[n + 1], &trace[n], &data.images[n + 1], &data.images[n], opts.probe)?;
        e1_exact &= exact;
        if let Some(u) = miss {
            e1 = Some(
                Witness::new("u ∈ Φ(x_{n+1}) but u ∉ Φ(x_n)")
                    .steps([n])
                    .points([pj(&u)]),
            );
            break;
        }
    }

    // E2
    let start = opts.tail_start(len);
    let mut e2_exact = true;
    let mut e2 = None;
    for n in start..len {
        let g = &data.gaps[n];
        e2_exact &= g.exact;
        if g.value > opts.tol {
            let mut w = Witness::new("sup-gap above tolerance in the tail window")
                .steps([n])
                .values([g.value]);
            if let Some(a) = &g.argmax {
                w = w.points([pj(a)]);
            }
            e2 = Some(w);
            break;
        }
    }

    // E3
    let mut pool: Vec<S::Point> = Vec::new();
    for p in trace.iter().chain(extra).chain(candidate) {
        push_unique(&mut pool, p);
    }
    let (e3_entry, xbar) = match candidate {
        Some(c) => {
            let miss = trace.iter().enumerate().find_map(|(n, x)| match map.member(x, c) {
                Ok(true) => None,
                Ok(false) => Some(Ok(n)),
                Err(e) => Some(Err(e)),
            });
            let w = miss.transpose()?.map(|n| Witness::new("x̄ ∉ Φ(x_n)").steps([n]).points([pj(c)]));
            (entry("E3", Mode::Exact, 0.0, w), Some(c.clone()))
        }
        None => {
            let search = universe.as_deref().unwrap_or(&pool);
            let found = common_points(trace, map, search)?;
            match (found.first(), universe.is_some()) {
                (Some(x), _) => (
                    ConditionEntry::holds("E3", Mode::Exact, 0.0).with_note(format!("x̄ = {}", pj(x))),
                    Some(x.clone()),
                ),
                (None, true) => (
                    ConditionEntry::fails("E3", Mode::Exact, 0.0, Witness::new("no point lies in every image")),
                    None,
                ),
                (None, false) => (
                    ConditionEntry::undetermined("E3", 0.0, "no common point among the candidates"),
                    None,
                ),
            }
        }
    };

    // E4
    let scan = universe.clone().unwrap_or_else(|| pool.clone());
    let limits = forward_limits(trace, space, &scan, opts)?;
    let e4_mode = Mode::from_exact(universe.is_some());
    let e4 = if limits.len() >= 2 {
        entry(
            "E4",
            e4_mode,
            opts.limit_eps,
            Some(
                Witness::new("two distinct forward limits")
                    .steps(start..len)
                    .points([pj(&limits[0]), pj(&limits[1])]),
            ),
        )
    } else {
        entry("E4", e4_mode, opts.limit_eps, None)
    };

    // E5
    let e5 = match &xbar {
        Some(c) => {
            let ic = map.image(c)?;
            let mut exact = true;
            let mut w = None;
            for (n, x) in trace.iter().enumerate() {
                let (miss, ex) = included(map, c, x, &ic, &data.images[n], opts.probe)?;
                exact &= ex;
                if let Some(u) = miss {
                    w = Some(Witness::new("u ∈ Φ(x̄) but u ∉ Φ(x_n)").steps([n]).points([pj(&u)]));
                    break;
                }
            }
            entry("E5", Mode::from_exact(exact), 0.0, w)
        }
        None => ConditionEntry::undetermined("E5", 0.0, "no x̄ available"),
    };

    Ok(ConditionReport::new(
        System::E,
        vec![
            entry("E1", Mode::from_exact(e1_exact), 0.0, e1),
            entry("E2", Mode::from_exact(e2_exact), opts.tol, e2)
                .with_note(format!("tail window {}..{len}", start)),
            e3_entry,
            e4,
            e5,
        ],
    ))
}

/// Exact Picard graph of a map on a listed universe with exact images.
fn picard_graph<S, M>(map: &M, space: &S, pts: &[S::Point]) -> Result<Option<(PicardGraph, Vec<f64>)>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    if pts.len() > MAX_EXACT_POINTS {
        return Ok(None);
    }
    let n = pts.len();
    let mut adj = vec![vec![false; n]; n];
    let mut q = vec![vec![0.0; n]; n];
    let mut gap = vec![0.0f64; n];
    for i in 0..n {
        if !map.image(&pts[i])?.is_exact() {
            return Ok(None);
        }
        for j in 0..n {
            adj[i][j] = map.member(&pts[i], &pts[j])?;
            q[i][j] = space.distance(&pts[i], &pts[j])?;
            if adj[i][j] {
                gap[i] = gap[i].max(q[i][j]);
            }
        }
    }
    Ok(Some((PicardGraph { adj, q }, gap)))
}

/// `u ∈ Φ(x) ⇒ Φ(u) ⊆ Φ(x)` over `pool` (every point when exact).
fn transitive_nesting<S, M>(map: &M, space: &S, pool: &[S::Point], exact_universe: bool, probe: usize) -> Result<(Option<Witness>, bool)>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let pj = |p: &S::Point| space.point_to_json(p);
    let mut exact = exact_universe;
    for x in pool {
        let ix = map.image(x)?;
        let members: Vec<S::Point> = if exact_universe {
            let mut v = Vec::new();
            for u in pool {
                if map.member(x, u)? {
                    v.push(u.clone());
                }
            }
            v
        } else {
            ix.probe_points(probe)
        };
        for u in &members {
            let iu = map.image(u)?;
            let (miss, ex) = if exact_universe {
                let mut miss = None;
                for v in pool {
                    if map.member(u, v)? && !map.member(x, v)? {
                        miss = Some(v.clone());
                        break;
                    }
                }
                (miss, true)
            } else {
                included(map, u, x, &iu, &ix, probe)?
            };
            exact &= ex && exact_universe;
            if let Some(v) = miss {
                return Ok((
                    Some(Witness::new("u ∈ Φ(x) and v ∈ Φ(u) but v ∉ Φ(x)").points([pj(x), pj(u), pj(&v)])),
                    exact,
                ));
            }
        }
    }
    Ok((None, exact))
}

fn walk_json<S: QuasiMetric + ?Sized>(space: &S, pts: &[S::Point], idx: &[usize]) -> Vec<Value> {
    idx.iter().map(|&i| space.point_to_json(&pts[i])).collect()
}

/// Per-trace verdicts of the step-decay condition: `q(x_n, x_{n+1})` and,
/// at the last point, its sup-gap (bounding any further step) must be at
/// most `tol` across the tail window.
fn step_decay<S, M>(traces: &[Vec<S::Point>], map: &M, space: &S, opts: &CheckOptions) -> Result<Option<Witness>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    for (t, trace) in traces.iter().enumerate() {
        if trace.is_empty() {
            continue;
        }
        validate_picard(trace, map)?;
        let len = trace.len();
        for n in opts.tail_start(len)..len {
            let d = if n + 1 < len {
                space.distance(&trace[n], &trace[n + 1])?
            } else {
                map.image(&trace[n])?.sup_distance(space, &trace[n], opts.grid)?.value
            };
            if d > opts.tol {
                return Ok(Some(
                    Witness::new(format!("trace {t}: step distance above tolerance in the tail window"))
                        .steps([n])
                        .values([d])
                        .walk(trace.iter().map(|p| space.point_to_json(p))),
                ));
            }
        }
    }
    Ok(None)
}

/// Checks (F1)–(F4).
///
/// On listed universes of at most [`MAX_EXACT_POINTS`] points with exact
/// images every condition is decided exactly by searching the Picard graph
/// for a bad infinite walk. Otherwise (F1) is probed around the trace and
/// `extra` points and (F2)–(F4) are evaluated on each supplied trace.
pub fn check_f_conditions<S, M>(
    map: &M,
    space: &S,
    traces: &[Vec<S::Point>],
    extra: &[S::Point],
    opts: &CheckOptions,
) -> Result<ConditionReport>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let pj = |p: &S::Point| space.point_to_json(p);
    if let Some(pts) = space.points() {
        if let Some((g, gap)) = picard_graph(map, space, &pts)? {
            let (f1, _) = transitive_nesting(map, space, &pts, true, opts.probe)?;
            let f2 = g.empty_intersection_walk(&gap, opts.tol).map(|(prefix, cycle)| {
                Witness::new("a walk with vanishing sup-gaps whose images have empty intersection")
                    .steps([prefix.len() - 1])
                    .walk(walk_json(space, &pts, &prefix).into_iter().chain(walk_json(space, &pts, &cycle[1..])))
            });
            let f3 = g.cauchy_walk_with_two_limits(opts.limit_eps).map(|(t, a, b)| {
                Witness::new("a forward Cauchy walk with two forward limits")
                    .points([pj(&pts[a]), pj(&pts[b])])
                    .walk(walk_json(space, &pts, &g.tour(&t)))
            });
            let f4 = g.nonvanishing_cycle(opts.tol).map(|c| {
                let (x, u) = (c[0], c[1]);
                Witness::new("a cycle through a step of positive length")
                    .points([pj(&pts[x]), pj(&pts[u])])
                    .values([g.q[x][u]])
                    .walk(walk_json(space, &pts, &c))
            });
            return Ok(ConditionReport::new(
                System::F,
                vec![
                    entry("F1", Mode::Exact, 0.0, f1),
                    entry("F2", Mode::Exact, opts.tol, f2),
                    entry("F3", Mode::Exact, opts.limit_eps, f3),
                    entry("F4", Mode::Exact, opts.tol, f4),
                ],
            ));
        }
    }

    let mut pool = Vec::new();
    for p in traces.iter().flatten().chain(extra) {
        push_unique(&mut pool, p);
    }
    let (f1, _) = transitive_nesting(map, space, &pool, false, opts.probe)?;
    let f1 = entry("F1", Mode::Sampled, 0.0, f1);
    if traces.iter().all(|t| t.is_empty()) {
        return Ok(ConditionReport::new(
            System::F,
            vec![
                f1,
                ConditionEntry::undetermined("F2", opts.tol, "no traces supplied"),
                ConditionEntry::undetermined("F3", opts.limit_eps, "no traces supplied"),
                ConditionEntry::undetermined("F4", opts.tol, "no traces supplied"),
            ],
        ));
    }

    let mut f2_unknown = false;
    let mut f3 = None;
    for (t, trace) in traces.iter().enumerate().filter(|(_, t)| !t.is_empty()) {
        validate_picard(trace, map)?;
        let data = analyze_trace(trace, map, space, opts.grid)?;
        let start = opts.tail_start(trace.len());
        let vanishing = data.gaps[start..].iter().all(|g| g.value <= opts.tol);
        if vanishing && common_points(trace, map, &pool)?.is_empty() {
            f2_unknown = true;
        }
        let limits = forward_limits(trace, space, &pool, opts)?;
        let tail = &trace[start..];
        let mut cauchy = true;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                cauchy &= space.distance(a, b)? <= opts.limit_eps;
            }
        }
        if cauchy && limits.len() >= 2 && f3.is_none() {
            f3 = Some(
                Witness::new(format!("trace {t}: forward Cauchy tail with two forward limits"))
                    .points([pj(&limits[0]), pj(&limits[1])])
                    .walk(trace.iter().map(pj)),
            );
        }
    }
    let f2 = if f2_unknown {
        ConditionEntry::undetermined("F2", opts.tol, "no common point among the candidates")
    } else {
        entry("F2", Mode::Sampled, opts.tol, None)
    };
    let f4 = step_decay(traces, map, space, opts)?;
    Ok(ConditionReport::new(
        System::F,
        vec![
            f1,
            f2,
            entry("F3", Mode::Sampled, opts.limit_eps, f3),
            entry("F4", Mode::Sampled, opts.tol, f4),
        ],
    ))
}

/// Checks (A1)–(A4), which presuppose a symmetric distance.
///
/// `closed_images` supplies (A1) on spaces that cannot be listed; on finite
/// spaces every image is closed.
pub fn check_a_conditions<S, M>(
    map: &M,
    space: &S,
    traces: &[Vec<S::Point>],
    extra: &[S::Point],
    closed_images: Option<bool>,
    opts: &CheckOptions,
) -> Result<ConditionReport>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let pj = |p: &S::Point| space.point_to_json(p);
    let listed = space.points();
    let exact = listed.is_some();
    let pool = match &listed {
        Some(p) => p.clone(),
        None => {
            let mut v = Vec::new();
            for p in traces.iter().flatten().chain(extra) {
                push_unique(&mut v, p);
            }
            v
        }
    };

    let mut asym = None;
    'sym: for (i, x) in pool.iter().enumerate() {
        for y in &pool[i + 1..] {
            let (a, b) = (space.distance(x, y)?, space.distance(y, x)?);
            if a != b {
                asym = Some(Witness::new("q(x, y) != q(y, x)").points([pj(x), pj(y)]).values([a, b]));
                break 'sym;
            }
        }
    }
    let symmetry = entry("symmetry", Mode::from_exact(exact), 0.0, asym.clone());
    if asym.is_some() {
        let reason = "the A-system is stated for metric spaces and the distance is not symmetric";
        return Ok(ConditionReport::new(
            System::A,
            ["A1", "A2", "A3", "A4"]
                .iter()
                .map(|l| ConditionEntry::undetermined(*l, opts.tol, reason))
                .collect(),
        )
        .with_informational(vec![symmetry]));
    }

    let a1 = if exact {
        ConditionEntry::holds("A1", Mode::Exact, 0.0).with_note("every subset of a finite space is closed")
    } else {
        match closed_images {
            Some(true) => ConditionEntry::holds("A1", Mode::Sampled, 0.0).with_note("closedness supplied by the caller"),
            Some(false) => ConditionEntry::fails(
                "A1",
                Mode::Sampled,
                0.0,
                Witness::new("caller reports non-closed images"),
            ),
            None => ConditionEntry::undetermined("A1", 0.0, "closedness of images not supplied"),
        }
    };

    let mut a2 = None;
    for x in &pool {
        if !map.member(x, x)? {
            a2 = Some(Witness::new("x ∉ Φ(x)").points([pj(x)]));
            break;
        }
    }
    let (a3, a3_exact) = transitive_nesting(map, space, &pool, exact, opts.probe)?;

    let graph = match &listed {
        Some(pts) => picard_graph(map, space, pts)?,
        None => None,
    };
    let a4 = match (&graph, &listed) {
        (Some((g, _)), Some(pts)) => entry(
            "A4",
            Mode::Exact,
            opts.tol,
            g.nonvanishing_cycle(opts.tol).map(|c| {
                Witness::new("a cycle through a step of positive length")
                    .points([pj(&pts[c[0]]), pj(&pts[c[1]])])
                    .values([g.q[c[0]][c[1]]])
                    .walk(walk_json(space, pts, &c))
            }),
        ),
        _ if traces.iter().all(|t| t.is_empty()) => ConditionEntry::undetermined("A4", opts.tol, "no traces supplied"),
        _ => entry("A4", Mode::Sampled, opts.tol, step_decay(traces, map, space, opts)?),
    };

    Ok(ConditionReport::new(
        System::A,
        vec![
            a1,
            entry("A2", Mode::from_exact(exact), 0.0, a2),
            entry("A3", Mode::from_exact(a3_exact), 0.0, a3),
            a4,
        ],
    )
    .with_informational(vec![symmetry]))
}

/// `p` viewed as a distance, for sup computations over images.
struct PDistance<'a, S: QuasiMetric>(&'a TauFunction<S>);

impl<S: QuasiMetric> QuasiMetric for PDistance<'_, S> {
    type Point = S::Point;

    fn distance(&self, x: &S::Point, y: &S::Point) -> Result<f64> {
        self.0.p(x, y)
    }

    fn contains(&self, x: &S::Point) -> bool {
        self.0.base().contains(x)
    }

    fn points(&self) -> Option<Vec<S::Point>> {
        self.0.base().points()
    }

    fn scalar_extent(&self) -> Option<Interval> {
        self.0.base().scalar_extent()
    }

    fn point_to_json(&self, x: &S::Point) -> Value {
        self.0.base().point_to_json(x)
    }
}

/// Checks (B1)–(B3) for a trace, a generalized distance `p` and a limit `x̄`.
///
/// (B4) and the tail decay of `p(x_n, x̄)` are reported as informational
/// entries.
pub fn check_b_conditions<S, M>(
    trace: &[S::Point],
    map: &M,
    tau: &TauFunction<S>,
    xbar: &S::Point,
    opts: &CheckOptions,
) -> Result<ConditionReport>
where
    S: QuasiMetric,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    if trace.is_empty() {
        return Err(Error::param("trace", "must not be empty"));
    }
    validate_picard(trace, map)?;
    let p = PDistance(tau);
    let pj = |x: &S::Point| tau.base().point_to_json(x);
    let data = analyze_trace(trace, map, &p, opts.grid)?;
    let len = trace.len();
    let start = opts.tail_start(len);

    let mut b1_exact = true;
    let mut b1 = None;
    for n in 0..len - 1 {
        let (miss, exact) = included(map, &trace[n + 1], &trace[n], &data.images[n + 1], &data.images[n], opts.probe)?;
        b1_exact &= exact;
        if let Some(u) = miss {
            b1 = Some(Witness::new("u ∈ Φ(x_{n+1}) but u ∉ Φ(x_n)").steps([n]).points([pj(&u)]));
            break;
        }
    }

    let mut b2_exact = true;
    let mut b2 = None;
    for n in start..len {
        let g = &data.gaps[n];
        b2_exact &= g.exact;
        if g.value > opts.tol {
            b2 = Some(Witness::new("sup of p over the image above tolerance in the tail window").steps([n]).values([g.value]));
            break;
        }
    }

    let mut b3 = None;
    for (n, x) in trace.iter().enumerate() {
        if !map.member(x, xbar)? {
            b3 = Some(Witness::new("x̄ ∉ Φ(x_n)").steps([n]).points([pj(xbar)]));
            break;
        }
    }

    let ib = map.image(xbar)?;
    let b4 = if ib.is_empty() {
        entry("B4", Mode::Exact, 0.0, Some(Witness::new("Φ(x̄) is empty").points([pj(xbar)])))
    } else {
        let mut exact = true;
        let mut w = None;
        for (n, x) in trace.iter().enumerate() {
            let (miss, ex) = included(map, xbar, x, &ib, &data.images[n], opts.probe)?;
            exact &= ex;
            if let Some(u) = miss {
                w = Some(Witness::new("u ∈ Φ(x̄) but u ∉ Φ(x_n)").steps([n]).points([pj(&u)]));
                break;
            }
        }
        entry("B4", Mode::from_exact(exact), 0.0, w)
    };

    let mut conv = None;
    for (n, x) in trace.iter().enumerate().skip(start) {
        let d = tau.p(x, xbar)?;
        if d > opts.limit_eps {
            conv = Some(Witness::new("p(x_n, x̄) above tolerance in the tail window").steps([n]).values([d]));
            break;
        }
    }

    Ok(ConditionReport::new(
        System::B,
        vec![
            entry("B1", Mode::from_exact(b1_exact), 0.0, b1),
            entry("B2", Mode::from_exact(b2_exact), opts.tol, b2),
            entry("B3", Mode::Exact, 0.0, b3),
        ],
    )
    .with_informational(vec![b4, entry("p_convergence", Mode::Sampled, opts.limit_eps, conv)]))
}

fn ext_json(v: ExtReal) -> f64 {
    match v {
        ExtReal::NegInf => f64::NEG_INFINITY,
        ExtReal::Finite(t) => t,
        ExtReal::PosInf => f64::INFINITY,
    }
}

fn ext_min(a: ExtReal, b: ExtReal) -> ExtReal {
    if a.partial_cmp(&b) == Some(Ordering::Greater) {
        b
    } else {
        a
    }
}

/// Checks (C1)–(C3) for a preorder, a utility and a start point `x₀`.
///
/// With `universe` the level sets are enumerated exactly; otherwise they
/// are restricted to the trace, `x₀` and `extra`, and verdicts are sampled.
/// (C2) is checked at every `x ∈ S(x₀)` of the enumerated points. (C3) is
/// evaluated on the supplied trace: when its inf-gaps
/// `φ(x_n) - inf φ(S(x_{n-1}))` vanish over the tail window, some point must
/// lie in every `S(x_n)`.
#[allow(clippy::too_many_arguments)]
pub fn check_c_conditions<O>(
    order: &O,
    phi: &Utility<O::Point>,
    x0: &O::Point,
    trace: &[O::Point],
    universe: Option<&[O::Point]>,
    extra: &[O::Point],
    opts: &CheckOptions,
) -> Result<ConditionReport>
where
    O: Preorder + ?Sized,
{
    let pj = |x: &O::Point| serde_json::to_value(x).unwrap_or(Value::Null);
    let exact = universe.is_some();
    let mode = Mode::from_exact(exact);
    let pool: Vec<O::Point> = match universe {
        Some(u) => u.to_vec(),
        None => {
            let mut v = Vec::new();
            for p in std::iter::once(x0).chain(trace).chain(extra) {
                push_unique(&mut v, p);
            }
            v
        }
    };
    let level = |x: &O::Point| -> Result<Vec<O::Point>> {
        let mut v = Vec::new();
        for u in &pool {
            if order.related(u, x)? {
                v.push(u.clone());
            }
        }
        Ok(v)
    };
    let inf = |set: &[O::Point]| set.iter().map(|u| phi.eval(u)).fold(ExtReal::PosInf, ext_min);

    if let Some(first) = trace.first() {
        if !order.related(first, x0)? {
            return Err(Error::param("trace", "first point is not in S(x0)"));
        }
    }
    for (n, w) in trace.windows(2).enumerate() {
        if !order.related(&w[1], &w[0])? {
            return Err(Error::NotPicard { step: n });
        }
    }

    let s0 = level(x0)?;
    let i0 = inf(&s0);
    let c1 = entry(
        "C1",
        mode,
        0.0,
        (!i0.is_finite()).then(|| {
            Witness::new("inf of φ over S(x0) is not finite")
                .points([pj(x0)])
                .values([ext_json(i0)])
        }),
    );

    let mut c2 = None;
    'c2: for x in &s0 {
        let fx = phi.eval(x);
        if !fx.is_finite() {
            continue;
        }
        let sx = level(x)?;
        for (i, z1) in sx.iter().enumerate() {
            for z2 in &sx[i + 1..] {
                let m = ext_min(phi.eval(z1), phi.eval(z2));
                if fx.partial_cmp(&m) != Some(Ordering::Greater) {
                    c2 = Some(
                        Witness::new("φ(x) <= min(φ(z1), φ(z2)) for distinct z1, z2 ∈ S(x)")
                            .points([pj(x), pj(z1), pj(z2)])
                            .values([ext_json(fx), ext_json(phi.eval(z1)), ext_json(phi.eval(z2))]),
                    );
                    break 'c2;
                }
            }
        }
    }

    let c3 = if trace.is_empty() {
        ConditionEntry::undetermined("C3", opts.tol, "no trace supplied")
    } else {
        let len = trace.len();
        let start = opts.tail_start(len).max(1);
        let mut vanishing = true;
        for n in start..len {
            let g = match (phi.eval(&trace[n]), inf(&level(&trace[n - 1])?)) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => a - b,
                _ => f64::INFINITY,
            };
            vanishing &= g <= opts.tol;
        }
        if !vanishing {
            ConditionEntry::holds("C3", mode, opts.tol).with_note("inf-gaps do not vanish on this trace")
        } else {
            let mut found = None;
            'search: for y in &pool {
                for x in trace {
                    if !order.related(y, x)? {
                        continue 'search;
                    }
                }
                found = Some(y.clone());
                break;
            }
            match (found, exact) {
                (Some(y), _) => ConditionEntry::holds("C3", mode, opts.tol).with_note(format!("x* = {}", pj(&y))),
                (None, true) => ConditionEntry::fails(
                    "C3",
                    Mode::Exact,
                    opts.tol,
                    Witness::new("no point lies in every S(x_n)").walk(trace.iter().map(pj)),
                ),
                (None, false) => ConditionEntry::undetermined("C3", opts.tol, "no common point among the candidates"),
            }
        }
    };

    Ok(ConditionReport::new(System::C, vec![c1, entry("C2", mode, 0.0, c2), c3]))
}

/// Checks (τ1)–(τ4) for a generalized distance.
///
/// On listed bases all four are decided exactly: (τ2) is automatic, and
/// (τ3) fails exactly when some `a` has `p(a, a) = 0` and `p(a, y) = 0` for
/// some `y != a` (the constant sequences `a` and `y` break it). Otherwise
/// (τ1) and (τ4) are checked on `points`, (τ3) on the supplied sequence
/// pairs, and (τ2) is undetermined. For weak τ-functions (τ2) is reported
/// as informational.
pub fn check_tau_axioms<S>(
    tau: &TauFunction<S>,
    points: &[S::Point],
    sequences: &[(Vec<S::Point>, Vec<S::Point>)],
    opts: &CheckOptions,
) -> Result<ConditionReport>
where
    S: QuasiMetric,
{
    let base = tau.base();
    let pj = |x: &S::Point| base.point_to_json(x);
    let listed = base.points();
    let exact = listed.is_some();
    let pool = listed.unwrap_or_else(|| points.to_vec());
    let mode = Mode::from_exact(exact);
    let zero_tol = if exact { 0.0 } else { 1e-12 };

    let mut t1 = None;
    't1: for x in &pool {
        for y in &pool {
            let pxy = tau.p(x, y)?;
            for z in &pool {
                let (pxz, pyz) = (tau.p(x, z)?, tau.p(y, z)?);
                if pxz > pxy + pyz + zero_tol {
                    t1 = Some(
                        Witness::new("p(x, z) > p(x, y) + p(y, z)")
                            .points([pj(x), pj(y), pj(z)])
                            .values([pxz, pxy, pyz]),
                    );
                    break 't1;
                }
            }
        }
    }

    let t2 = if exact {
        ConditionEntry::holds("τ2", Mode::Exact, 0.0).with_note("every function on a finite metric space is continuous")
    } else {
        ConditionEntry::undetermined("τ2", 0.0, "lower semicontinuity cannot be tested on a black-box p")
    };

    let t3 = if exact {
        let mut w = None;
        'a: for a in &pool {
            if tau.p(a, a)? != 0.0 {
                continue;
            }
            for y in &pool {
                if y != a && tau.p(a, y)? == 0.0 {
                    w = Some(
                        Witness::new("constant sequences x_n = a, y_n = y: p(x_n, y_n) = 0 and p(a, a) = 0 but d(a, y) > 0")
                            .points([pj(a), pj(y)])
                            .values([tau.d(a, y)?]),
                    );
                    break 'a;
                }
            }
        }
        entry("τ3", Mode::Exact, 0.0, w)
    } else if sequences.is_empty() {
        ConditionEntry::undetermined("τ3", opts.limit_eps, "no sequence pairs supplied")
    } else {
        let mut w = None;
        'seq: for (k, (xs, ys)) in sequences.iter().enumerate() {
            let len = xs.len().min(ys.len());
            if len == 0 {
                continue;
            }
            let start = opts.tail_start(len);
            let mut hyp = true;
            for n in start..len {
                hyp &= tau.p(&xs[n], &ys[n])? <= opts.limit_eps;
                for m in n + 1..xs.len() {
                    hyp &= tau.p(&xs[n], &xs[m])? <= opts.limit_eps;
                }
            }
            if !hyp {
                continue;
            }
            for n in start..len {
                let d = tau.d(&xs[n], &ys[n])?;
                if d > opts.limit_eps {
                    w = Some(
                        Witness::new(format!("pair {k}: p-convergent tail with d(x_n, y_n) above tolerance"))
                            .steps([n])
                            .points([pj(&xs[n]), pj(&ys[n])])
                            .values([d]),
                    );
                    break 'seq;
                }
            }
        }
        entry("τ3", Mode::Sampled, opts.limit_eps, w)
    };

    let mut t4 = None;
    't4: for x in &pool {
        for (i, y) in pool.iter().enumerate() {
            if tau.p(x, y)? > zero_tol {
                continue;
            }
            for z in &pool[i + 1..] {
                if tau.p(x, z)? <= zero_tol {
                    t4 = Some(Witness::new("p(x, y) = p(x, z) = 0 with y != z").points([pj(x), pj(y), pj(z)]));
                    break 't4;
                }
            }
        }
    }

    let mut conditions = vec![entry("τ1", mode, zero_tol, t1)];
    let mut informational = Vec::new();
    if tau.is_weak() {
        informational.push(t2);
    } else {
        conditions.push(t2);
    }
    conditions.push(t3);
    conditions.push(entry("τ4", mode, zero_tol, t4));
    Ok(ConditionReport::new(System::Tau, conditions).with_informational(informational))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Status;
    use crate::qspace::{BuiltinMetric, FiniteQuasiMetricSpace, ScalarSpace};
    use crate::setmap::{ExtensionalMap, FinitePreorder, IdentityMap, IntervalMap};

    fn remark() -> (ScalarSpace, IntervalMap) {
        (
            ScalarSpace::new(BuiltinMetric::Remark46),
            IntervalMap::zero_to_x(Interval::new(0.0, 1.0)),
        )
    }

    fn harmonic(k: usize) -> Vec<f64> {
        (1..=k).map(|n| 1.0 / n as f64).collect()
    }

    fn discrete(n: usize) -> FiniteQuasiMetricSpace {
        FiniteQuasiMetricSpace::from_matrix(
            (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn remark_e_conditions_on_harmonic_trace() {
        let (s, m) = remark();
        let t = harmonic(100);
        // sup-gap at x_n = 1/n is exactly 1/n; the tail window ends at 1/100
        let opts = CheckOptions::continuous().with_tol(0.011);
        let r = check_e_conditions(&t, &m, &s, Some(&0.0), &[], &opts).unwrap();
        assert_eq!(r.overall, Status::Holds, "{r:?}");
        for l in ["E1", "E3", "E5"] {
            assert!(r.holds_exact(l), "{l}");
        }
        assert!(r.holds_exact("E2"));
        assert_eq!(r.get("E4").unwrap().mode, Mode::Sampled);
        let d = analyze_trace(&t, &m, &s, DEFAULT_GRID).unwrap();
        for (n, g) in d.gaps.iter().enumerate() {
            assert_eq!(g.value, t[n]);
        }
        let strict = check_e_conditions(&t, &m, &s, Some(&0.0), &[], &CheckOptions::continuous()).unwrap();
        assert_eq!(strict.status("E2"), Some(Status::Fails));
    }

    #[test]
    fn constant_trace_on_identity() {
        let s = discrete(3);
        let m = ExtensionalMap::identity(3);
        let r = check_e_conditions(&[1, 1, 1], &m, &s, Some(&1), &[], &CheckOptions::finite()).unwrap();
        assert_eq!(r.overall, Status::Holds);
        assert!(r.conditions.iter().all(|c| c.mode == Mode::Exact));
    }

    #[test]
    fn non_nested_images_fail_e1() {
        let s = discrete(4);
        // Φ(0) = {0, 1}, Φ(1) = {1, 2}: 2 ∈ Φ(x_1) \ Φ(x_0)
        let m = ExtensionalMap::new(vec![vec![0, 1], vec![1, 2], vec![2], vec![3]]).unwrap();
        let r = check_e_conditions(&[0, 1], &m, &s, None, &[], &CheckOptions::finite()).unwrap();
        let w = r.get("E1").unwrap().witness.clone().unwrap();
        assert_eq!((w.steps, w.points), (vec![0], vec![Value::from("x2")]));
        assert!(matches!(
            check_e_conditions(&[0, 2], &m, &s, None, &[], &CheckOptions::finite()),
            Err(Error::NotPicard { step: 0 })
        ));
    }

    #[test]
    fn two_forward_limits_fail_e4() {
        // q(0, 1) = 0: a constant trace at 0 has both 0 and 1 as forward limits
        let s = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let m = ExtensionalMap::identity(2);
        let r = check_e_conditions(&[0, 0], &m, &s, Some(&0), &[], &CheckOptions::finite()).unwrap();
        assert_eq!(r.status("E4"), Some(Status::Fails));
        assert!(r.holds("E1") && r.holds("E2") && r.holds("E3"));
    }

    #[test]
    fn f_conditions_remark_map() {
        let (s, m) = remark();
        let r = check_f_conditions(&m, &s, &[vec![1.0, 0.0]], &[0.5, 0.25], &CheckOptions::continuous()).unwrap();
        assert_eq!(r.overall, Status::Holds, "{r:?}");
        assert!(r.conditions.iter().all(|c| c.mode == Mode::Sampled));
    }

    #[test]
    fn f_conditions_identity_and_cycle() {
        let s = discrete(3);
        let r = check_f_conditions(&ExtensionalMap::identity(3), &s, &[], &[], &CheckOptions::finite()).unwrap();
        assert_eq!(r.overall, Status::Holds);
        assert!(r.conditions.iter().all(|c| c.mode == Mode::Exact));

        let cyc = ExtensionalMap::new(vec![vec![1], vec![0], vec![2]]).unwrap();
        let r = check_f_conditions(&cyc, &s, &[], &[], &CheckOptions::finite()).unwrap();
        let w = r.get("F4").unwrap().witness.clone().unwrap();
        assert_eq!(w.walk, vec![Value::from("x0"), Value::from("x1"), Value::from("x0")]);
        assert_eq!(w.values, vec![1.0]);
    }

    #[test]
    fn a_conditions() {
        let s = discrete(3);
        let r = check_a_conditions(&ExtensionalMap::identity(3), &s, &[], &[], None, &CheckOptions::finite()).unwrap();
        assert_eq!(r.overall, Status::Holds);

        let p = FinitePreorder::from_edges(3, &[(0, 1), (1, 2)], true).unwrap();
        let r = check_a_conditions(&p.level_set_map(), &s, &[], &[], None, &CheckOptions::finite()).unwrap();
        assert!(r.holds_exact("A2") && r.holds_exact("A3"));

        let swap = ExtensionalMap::new(vec![vec![1], vec![0], vec![2]]).unwrap();
        let r = check_a_conditions(&swap, &s, &[], &[], None, &CheckOptions::finite()).unwrap();
        assert_eq!(r.status("A4"), Some(Status::Fails));
        assert_eq!(r.status("A2"), Some(Status::Fails));

        let asym = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let r = check_a_conditions(&ExtensionalMap::identity(2), &asym, &[], &[], None, &CheckOptions::finite()).unwrap();
        assert_eq!(r.overall, Status::Undetermined);
    }

    #[test]
    fn b_conditions_with_metric_p() {
        let base = ScalarSpace::new(BuiltinMetric::AbsDiff);
        let tau = TauFunction::new(base, |x: &f64, y: &f64| (x - y).abs(), false);
        let m = IntervalMap::zero_to_x(Interval::new(0.0, 1.0));
        let mut t = harmonic(50);
        t.extend([0.0; 10]);
        let r = check_b_conditions(&t, &m, &tau, &0.0, &CheckOptions::continuous()).unwrap();
        assert_eq!(r.overall, Status::Holds, "{r:?}");
        assert_eq!(r.status("B4"), Some(Status::Holds));
        assert_eq!(r.status("p_convergence"), Some(Status::Holds));

        let r = check_b_conditions(&[1.0, 0.5], &m, &tau, &0.75, &CheckOptions::continuous()).unwrap();
        assert_eq!(r.get("B3").unwrap().witness.as_ref().unwrap().steps, vec![1]);
    }

    #[test]
    fn c_conditions_on_chain() {
        let p = FinitePreorder::from_edges(3, &[(0, 1), (1, 2)], true).unwrap();
        let phi = Utility::from_values(vec![0.0.into(), 1.0.into(), 2.0.into()]);
        let all = [0, 1, 2];
        let r = check_c_conditions(&p, &phi, &2, &[2, 0], Some(&all), &[], &CheckOptions::finite()).unwrap();
        assert_eq!(r.overall, Status::Holds);
        assert_eq!(r.get("C3").unwrap().note.as_deref(), Some("x* = 0"));

        let single = FinitePreorder::from_edges(1, &[], true).unwrap();
        let phi1 = Utility::from_values(vec![5.0.into()]);
        let r = check_c_conditions(&single, &phi1, &0, &[0], Some(&[0]), &[], &CheckOptions::finite()).unwrap();
        assert_eq!(r.overall, Status::Holds);
    }

    #[test]
    fn c2_fails_on_tied_minimizers() {
        // z1 = 0 and z2 = 1 both below x = 2, all with φ = 0
        let p = FinitePreorder::from_edges(3, &[(0, 2), (1, 2)], true).unwrap();
        let phi = Utility::from_values(vec![0.0.into(); 3]);
        let r = check_c_conditions(&p, &phi, &2, &[2], Some(&[0, 1, 2]), &[], &CheckOptions::finite()).unwrap();
        let w = r.get("C2").unwrap().witness.clone().unwrap();
        assert_eq!(w.points, vec![Value::from(2), Value::from(0), Value::from(1)]);
    }

    #[test]
    fn c1_fails_on_infinite_utility() {
        let p = FinitePreorder::from_edges(2, &[(0, 1)], true).unwrap();
        let phi = Utility::from_values(vec![ExtReal::PosInf, ExtReal::PosInf]);
        let r = check_c_conditions(&p, &phi, &1, &[1], Some(&[0, 1]), &[], &CheckOptions::finite()).unwrap();
        assert_eq!(r.status("C1"), Some(Status::Fails));
    }

    #[test]
    fn tau_axioms() {
        let d = discrete(4);
        let dd = d.clone();
        let metric = TauFunction::new(d.clone(), move |x: &usize, y: &usize| dd.d(*x, *y), false);
        let r = check_tau_axioms(&metric, &[], &[], &CheckOptions::finite()).unwrap();
        assert_eq!(r.overall, Status::Holds);
        assert_eq!(r.conditions.len(), 4);

        let dd = d.clone();
        let shifted = TauFunction::new(d.clone(), move |x: &usize, y: &usize| if x == y { 0.0 } else { dd.d(*x, *y) + 1.0 }, true);
        assert!(check_tau_axioms(&shifted, &[], &[], &CheckOptions::finite()).unwrap().holds_exact("τ1"));

        let collapse = TauFunction::new(d, |x: &usize, y: &usize| if *x == 0 && *y != 3 { 0.0 } else { 1.0 }, true);
        let r = check_tau_axioms(&collapse, &[], &[], &CheckOptions::finite()).unwrap();
        let w = r.get("τ4").unwrap().witness.clone().unwrap();
        assert_eq!(w.points, vec![Value::from("x0"), Value::from("x0"), Value::from("x1")]);
        assert_eq!(r.status("τ3"), Some(Status::Fails));
    }

    #[test]
    fn tau2_is_undetermined_on_continuous_bases() {
        let base = ScalarSpace::new(BuiltinMetric::AbsDiff);
        let tau = TauFunction::new(base, |x: &f64, y: &f64| (x - y).abs(), false);
        let r = check_tau_axioms(&tau, &[0.0, 0.5, 1.0], &[], &CheckOptions::continuous()).unwrap();
        assert_eq!(r.status("τ2"), Some(Status::Undetermined));
        assert_eq!(r.status("τ3"), Some(Status::Undetermined));
        assert!(r.holds("τ1") && r.holds("τ4"));
    }

    #[test]
    fn identity_map_on_continuous_space() {
        let s = ScalarSpace::new(BuiltinMetric::Sorgenfrey);
        let m = IdentityMap::new(s.clone());
        let r = check_f_conditions(&m, &s, &[vec![0.3, 0.3]], &[], &CheckOptions::continuous()).unwrap();
        assert_eq!(r.overall, Status::Holds, "{r:?}");
    }
}
