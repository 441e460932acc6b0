use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::generate::{random_instance_with, FiniteInstance, GenParams, Profile, MAX_POINTS, MIN_POINTS};
use super::theorem::{intersection_images, verify_unified_theorem};
use crate::diagnostics::{
    check_b_conditions, check_c_conditions, check_e_conditions, check_f_conditions, check_tau_axioms, forward_limits,
    is_cauchy, CheckOptions, ConditionReport, Status,
};
use crate::error::{Error, Result};
use crate::picard::{find_invariant_point, iterate, Outcome, SearchConfig, SelectionRule};
use crate::qspace::{check_axioms, tabulate, Direction, FiniteQuasiMetricSpace, QuasiMetric};
use crate::setmap::{tau_to_quasimetric, utility_pseudometric, TauFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// E1 and E2 make the trace forward Cauchy.
    Prop42,
    /// E1, E2, point separation and a backward limit in every image give E3 and E4.
    Prop43,
    /// Under E1 and E2, E3 holds iff some forward limit lies in every image.
    Prop44,
    /// F1–F4 give a nonvariant point, found by the engine.
    Thm45,
    /// E1–E4 give the common-point conclusion, E5 the nonvariant one.
    Thm41,
    /// Level-set maps with a monotone utility: near-inf reaches a minimal point.
    ReductionQiu,
    /// The quasi-metric built from a generalized distance carries B-verdicts to E-verdicts.
    ReductionKq,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Prop42,
        Property::Prop43,
        Property::Prop44,
        Property::Thm45,
        Property::Thm41,
        Property::ReductionQiu,
        Property::ReductionKq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Prop42 => "prop42",
            Property::Prop43 => "prop43",
            Property::Prop44 => "prop44",
            Property::Thm45 => "thm45",
            Property::Thm41 => "thm41",
            Property::ReductionQiu => "reduction_qiu",
            Property::ReductionKq => "reduction_kq",
        }
    }

    pub fn profile(self) -> Profile {
        match self {
            Property::ReductionQiu => Profile::Preorder,
            _ => Profile::Nested,
        }
    }
}

impl std::str::FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("property", format!("unknown property `{s}`")))
    }
}

/// Verdict on one generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub hypothesis: bool,
    pub verified: bool,
    pub detail: Value,
}

impl CaseOutcome {
    fn filtered(detail: Value) -> Self {
        CaseOutcome {
            hypothesis: false,
            verified: false,
            detail,
        }
    }

    fn checked(verified: bool, detail: Value) -> Self {
        CaseOutcome {
            hypothesis: true,
            verified,
            detail,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.hypothesis && !self.verified
    }
}

/// Everything needed to regenerate and re-check a single case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub property: Property,
    pub index: usize,
    pub n: usize,
    pub seed: u64,
    pub params: GenParams,
}

/// A violating case with its instance attached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationDump {
    pub case: CaseSpec,
    pub instance: Value,
    pub outcome: CaseOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub property: Property,
    pub count: usize,
    pub sizes: (usize, usize),
    pub seed: u64,
    pub generated: usize,
    pub hypothesis_satisfied: usize,
    pub conclusion_verified: usize,
    pub violations: usize,
    pub dumps: Vec<ViolationDump>,
}

/// Distance probabilities alternate between these across a sweep, so half
/// the instances separate points and half have zero off-diagonal entries.
pub const ZERO_PROBS: [f64; 2] = [0.0, 0.15];

/// The cases of a sweep: sizes and seeds drawn from one generator seeded
/// with `seed`.
pub fn sweep_cases(property: Property, count: usize, sizes: (usize, usize), seed: u64) -> Result<Vec<CaseSpec>> {
    let (lo, hi) = sizes;
    if lo > hi || lo < MIN_POINTS || hi > MAX_POINTS {
        return Err(Error::param(
            "sizes",
            format!("need {MIN_POINTS} <= lo <= hi <= {MAX_POINTS}, got {lo}..={hi}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|index| CaseSpec {
            property,
            index,
            n: rng.gen_range(lo..=hi),
            seed: rng.gen(),
            params: GenParams::default().with_zero_prob(ZERO_PROBS[index % 2]),
        })
        .collect())
}

/// Generates the instances of `property` and checks each one, in parallel;
/// results are merged in case order.
pub fn property_sweep(property: Property, count: usize, sizes: (usize, usize), seed: u64) -> Result<SweepReport> {
    let cases = sweep_cases(property, count, sizes, seed)?;
    let results: Vec<(CaseSpec, Result<(FiniteInstance, CaseOutcome)>)> = cases
        .into_par_iter()
        .map(|c| {
            let r = run_case(&c);
            (c, r)
        })
        .collect();
    let mut report = SweepReport {
        property,
        count,
        sizes,
        seed,
        generated: 0,
        hypothesis_satisfied: 0,
        conclusion_verified: 0,
        violations: 0,
        dumps: Vec::new(),
    };
    for (case, r) in results {
        let (inst, outcome) = r?;
        report.generated += 1;
        report.hypothesis_satisfied += outcome.hypothesis as usize;
        report.conclusion_verified += (outcome.hypothesis && outcome.verified) as usize;
        if outcome.is_violation() {
            report.violations += 1;
            report.dumps.push(ViolationDump {
                case,
                instance: inst.to_json(),
                outcome,
            });
        }
    }
    Ok(report)
}

/// Regenerates the case and checks it again.
pub fn run_case(case: &CaseSpec) -> Result<(FiniteInstance, CaseOutcome)> {
    let inst = random_instance_with(case.n, case.seed, case.property.profile(), case.params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed ^ 0x5eed_cafe);
    let outcome = match case.property {
        Property::Prop42 => prop42(&inst, &mut rng),
        Property::Prop43 => prop43(&inst, &mut rng),
        Property::Prop44 => prop44(&inst, &mut rng),
        Property::Thm45 => thm45(&inst, &mut rng),
        Property::Thm41 => thm41(&inst, &mut rng),
        Property::ReductionQiu => reduction_qiu(&inst, &mut rng),
        Property::ReductionKq => reduction_kq(&inst, &mut rng),
    };
    // a checker error on a valid instance is itself a violation
    let outcome = outcome.unwrap_or_else(|e| CaseOutcome::checked(false, json!({ "error": e.to_string() })));
    Ok((inst, outcome))
}

/// Re-runs a dumped case; `Ok(true)` when the instance and the outcome are
/// reproduced exactly.
pub fn replay(dump: &ViolationDump) -> Result<(bool, CaseOutcome)> {
    let (inst, outcome) = run_case(&dump.case)?;
    Ok((inst.to_json() == dump.instance && outcome == dump.outcome, outcome))
}

fn pick(rng: &mut ChaCha8Rng, items: &[usize]) -> Option<usize> {
    (!items.is_empty()).then(|| items[rng.gen_range(0..items.len())])
}

/// A Picard trace of the instance map: a short random walk, then near-sup
/// steps, then either a constant tail, more random steps, or nothing.
pub fn sample_trace(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let n = inst.len();
    let mut trace = vec![rng.gen_range(0..n)];
    for _ in 0..rng.gen_range(0..=3) {
        match pick(rng, inst.map.image_of(*trace.last().expect("nonempty"))) {
            Some(u) => trace.push(u),
            None => break,
        }
    }
    let cfg = SearchConfig::finite().with_budget(12);
    let last = *trace.last().expect("nonempty");
    if !inst.map.image_of(last).is_empty() {
        let t = iterate(&inst.map, &inst.space, &last, &SelectionRule::near_sup(), &cfg)?;
        trace.extend_from_slice(&t.points[1..]);
    }
    match rng.gen_range(0..3) {
        0 => {
            let last = *trace.last().expect("nonempty");
            if inst.map.image_of(last).contains(&last) {
                trace.extend(std::iter::repeat_n(last, 11));
            }
        }
        1 => {
            while trace.len() < 12 {
                match pick(rng, inst.map.image_of(*trace.last().expect("nonempty"))) {
                    Some(u) => trace.push(u),
                    None => break,
                }
            }
        }
        _ => {}
    }
    Ok(trace)
}

fn e_report(inst: &FiniteInstance, trace: &[usize], candidate: Option<usize>) -> Result<ConditionReport> {
    check_e_conditions(trace, &inst.map, &inst.space, candidate.as_ref(), &[], &CheckOptions::finite())
}

fn e1_e2(r: &ConditionReport) -> bool {
    r.holds_exact("E1") && r.holds_exact("E2")
}

fn prop42(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<CaseOutcome> {
    let trace = sample_trace(inst, rng)?;
    let r = e_report(inst, &trace, None)?;
    if !e1_e2(&r) || trace.len() < 3 {
        return Ok(CaseOutcome::filtered(json!({ "trace": trace })));
    }
    let gaps: Vec<f64> = trace
        .iter()
        .map(|&x| inst.map.image_of(x).iter().map(|&u| inst.space.d(x, u)).fold(0.0, f64::max))
        .collect();
    let mut bound = None;
    for n in 0..trace.len() {
        for m in n + 1..trace.len() {
            if inst.space.d(trace[n], trace[m]) > gaps[n] {
                bound = Some((n, m));
            }
        }
    }
    let mut verdicts = Vec::new();
    for eps in [0.1, 0.01] {
        verdicts.push(is_cauchy(&trace, &inst.space, Direction::Forward, eps)?.status);
    }
    let ok = bound.is_none() && verdicts.iter().all(|s| *s != Status::Fails);
    Ok(CaseOutcome::checked(
        ok,
        json!({ "trace": trace, "pair_above_gap": bound, "cauchy": verdicts }),
    ))
}

fn prop43(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<CaseOutcome> {
    let trace = sample_trace(inst, rng)?;
    let r = e_report(inst, &trace, None)?;
    let separated = check_axioms(&inst.space)
        .informational
        .iter()
        .any(|e| e.label == "point_separation" && e.is_exact_holds());
    if !e1_e2(&r) || !separated {
        return Ok(CaseOutcome::filtered(json!({ "trace": trace, "separated": separated })));
    }
    let opts = CheckOptions::finite();
    let start = opts.tail_start(trace.len());
    let common = intersection_images(&inst.map, &trace);
    let xbar = common
        .iter()
        .copied()
        .find(|&y| trace[start..].iter().all(|&x| inst.space.d(y, x) <= opts.limit_eps));
    let Some(xbar) = xbar else {
        return Ok(CaseOutcome::filtered(json!({ "trace": trace, "backward_limit": null })));
    };
    let r = e_report(inst, &trace, Some(xbar))?;
    let ok = r.holds_exact("E3") && r.holds_exact("E4");
    Ok(CaseOutcome::checked(ok, json!({ "trace": trace, "xbar": xbar, "report": r })))
}

fn prop44(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<CaseOutcome> {
    let trace = sample_trace(inst, rng)?;
    let r = e_report(inst, &trace, None)?;
    if !e1_e2(&r) {
        return Ok(CaseOutcome::filtered(json!({ "trace": trace })));
    }
    let e3 = r.holds_exact("E3");
    let all: Vec<usize> = (0..inst.len()).collect();
    let limits = forward_limits(&trace, &inst.space, &all, &CheckOptions::finite())?;
    let common = intersection_images(&inst.map, &trace);
    let e3pp = common.iter().any(|y| limits.contains(y));
    Ok(CaseOutcome::checked(
        e3 == e3pp,
        json!({ "trace": trace, "E3": e3, "E3''": e3pp }),
    ))
}

fn nonvariant_points(inst: &FiniteInstance) -> Vec<usize> {
    (0..inst.len())
        .filter(|&x| inst.map.image_of(x).iter().all(|&u| u == x))
        .collect()
}

fn thm45(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<CaseOutcome> {
    let x0 = rng.gen_range(0..inst.len());
    let f = check_f_conditions(&inst.map, &inst.space, &[], &[], &CheckOptions::finite())?;
    if !f.holds_exactly() {
        let failed = f.first_failure().map(|e| e.label.clone());
        return Ok(CaseOutcome::filtered(json!({ "x0": x0, "failed": failed })));
    }
    let res = find_invariant_point(&inst.map, &inst.space, &x0, &SelectionRule::near_sup(), &SearchConfig::finite())?;
    let brute = nonvariant_points(inst);
    let ok = res.outcome.point().is_some_and(|p| brute.contains(p));
    Ok(CaseOutcome::checked(
        ok,
        json!({ "x0": x0, "outcome": res.to_json(&inst.space)["outcome"], "nonvariant": brute }),
    ))
}

fn thm41(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<CaseOutcome> {
    let trace = sample_trace(inst, rng)?;
    let common = intersection_images(&inst.map, &trace);
    let xbar = pick(rng, &common).unwrap_or(*trace.last().expect("nonempty"));
    let c = verify_unified_theorem(inst, &trace, xbar)?;
    let detail = json!({ "trace": trace, "xbar": xbar, "check": c });
    Ok(if c.preconditions_met() {
        CaseOutcome::checked(c.verified(), detail)
    } else {
        CaseOutcome::filtered(detail)
    })
}

fn reduction_qiu(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<CaseOutcome> {
    let (Some(order), Some(phi)) = (inst.preorder.as_ref(), inst.utility_fn()) else {
        return Err(Error::param("instance", "needs a preorder and a utility"));
    };
    let n = inst.len();
    let all: Vec<usize> = (0..n).collect();
    let x0 = rng.gen_range(0..n);
    let q = utility_pseudometric(&phi, &all)?.with_labels_from(&inst.space);
    let map = order.level_set_map();
    let res = find_invariant_point(&map, &q, &x0, &SelectionRule::near_inf(phi.clone()), &SearchConfig::finite())?;
    let c = check_c_conditions(order, &phi, &x0, &res.trace.points, Some(&all), &[], &CheckOptions::finite())?;
    let monotone = phi.monotonicity_violation(order, &all)?.is_none();
    if !c.holds_exactly() || !monotone {
        return Ok(CaseOutcome::filtered(json!({ "x0": x0, "C": c })));
    }
    let minimal = order.minimal_points(&order.level_set(x0));
    let ok = match &res.outcome {
        Outcome::InvariantPoint(x) => {
            minimal.contains(x) && order.level_set(*x) == [*x] && res.report.holds_exactly()
        }
        _ => false,
    };
    Ok(CaseOutcome::checked(
        ok,
        json!({
            "x0": x0,
            "outcome": res.to_json(&q)["outcome"],
            "minimal": minimal,
            "E": res.report,
        }),
    ))
}

fn reduction_kq(inst: &FiniteInstance, rng: &mut ChaCha8Rng) -> Result<CaseOutcome> {
    let n = inst.len();
    let d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| inst.space.d(i, j).max(inst.space.d(j, i))).collect())
        .collect();
    let base = FiniteQuasiMetricSpace::new(inst.space.labels().to_vec(), d.clone())?;
    // p = d, or d shifted by a weight on the target point
    let weights: Vec<f64> = if rng.gen_bool(0.5) {
        vec![0.0; n]
    } else {
        (0..n).map(|_| rng.gen_range(0..=8u32) as f64 / 8.0).collect()
    };
    let (dd, w) = (d.clone(), weights.clone());
    let tau = TauFunction::new(base, move |x: &usize, y: &usize| dd[*x][*y] + w[*y], false);
    let axioms = check_tau_axioms(&tau, &[], &[], &CheckOptions::finite())?;
    if !axioms.holds_exactly() {
        return Ok(CaseOutcome::filtered(json!({ "weights": weights, "tau": axioms })));
    }
    let q = tau_to_quasimetric(tau.clone(), None)?;
    let all: Vec<usize> = (0..n).collect();
    let qaxioms = check_axioms(&tabulate(&q, &all)?);
    let mut dominated = true;
    for x in 0..n {
        for y in 0..n {
            dominated &= q.distance(&x, &y)? <= tau.p(&x, &y)?;
        }
    }
    let trace = sample_trace(inst, rng)?;
    let xbar = *trace.last().expect("nonempty");
    let b = check_b_conditions(&trace, &inst.map, &tau, &xbar, &CheckOptions::finite())?;
    let e = check_e_conditions(&trace, &inst.map, &q, Some(&xbar), &[], &CheckOptions::finite())?;
    let st = |r: &ConditionReport, l: &str| r.status(l).unwrap_or(Status::Undetermined);
    let b1_e1 = st(&b, "B1") == st(&e, "E1");
    let b3_e3 = st(&b, "B3") != Status::Holds || st(&e, "E3") == Status::Holds;
    let b2_e2 = st(&b, "B2") != Status::Holds || st(&e, "E2") == Status::Holds;
    let ok = qaxioms.overall == Status::Holds && dominated && b1_e1 && b3_e3 && b2_e2;
    Ok(CaseOutcome::checked(
        ok,
        json!({
            "weights": weights,
            "trace": trace,
            "q_axioms": qaxioms.overall,
            "q_le_p": dominated,
            "B": b,
            "E": e,
        }),
    ))
}
