use serde::Serialize;

use super::generate::FiniteInstance;
use crate::diagnostics::{check_e_conditions, CheckOptions, ConditionReport};
use crate::error::Result;
use crate::picard::{classify_point, Classification};
use crate::qspace::{BuiltinMetric, FiniteQuasiMetricSpace, ScalarSpace};
use crate::setmap::ExtensionalMap;

/// `∩ Φ(x_n)` over the trace, sorted.
pub fn intersection_images(map: &ExtensionalMap, trace: &[usize]) -> Vec<usize> {
    let Some((first, rest)) = trace.split_first() else {
        return Vec::new();
    };
    let mut out: Vec<usize> = map.image_of(*first).to_vec();
    for &x in rest {
        let im = map.image_of(x);
        out.retain(|u| im.contains(u));
    }
    out.sort_unstable();
    out
}

/// Outcome of checking the common-point conclusion on one trace.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremCheck {
    /// First of E1–E4 that is not confirmed exactly, if any.
    pub unmet: Option<String>,
    pub intersection: Vec<usize>,
    pub e5: bool,
    pub classification: Option<String>,
    /// Set when a conclusion fails although its hypotheses were confirmed.
    pub violation: Option<String>,
    pub report: ConditionReport,
}

impl TheoremCheck {
    pub fn preconditions_met(&self) -> bool {
        self.unmet.is_none()
    }

    pub fn verified(&self) -> bool {
        self.preconditions_met() && self.violation.is_none()
    }
}

/// Confirms `∩ Φ(x_n) = {x̄}` whenever E1–E4 hold exactly for `(trace, x̄)`,
/// and `Φ(x̄) ⊆ {x̄}` (with equality when nonempty) when E5 holds too.
pub fn verify_unified_theorem(instance: &FiniteInstance, trace: &[usize], xbar: usize) -> Result<TheoremCheck> {
    verify_on(&instance.space, &instance.map, trace, xbar)
}

pub fn verify_on(space: &FiniteQuasiMetricSpace, map: &ExtensionalMap, trace: &[usize], xbar: usize) -> Result<TheoremCheck> {
    let report = check_e_conditions(trace, map, space, Some(&xbar), &[], &CheckOptions::finite())?;
    let intersection = intersection_images(map, trace);
    let unmet = ["E1", "E2", "E3", "E4"]
        .into_iter()
        .find(|l| !report.holds_exact(l))
        .map(String::from);
    let e5 = report.holds_exact("E5");
    let mut check = TheoremCheck {
        unmet,
        intersection,
        e5,
        classification: None,
        violation: None,
        report,
    };
    if !check.preconditions_met() {
        return Ok(check);
    }
    if check.intersection != [xbar] {
        check.violation = Some(format!(
            "intersection of images is {:?}, expected [{xbar}]",
            check.intersection
        ));
        return Ok(check);
    }
    if e5 {
        let c = classify_point(map, space, &xbar)?;
        check.classification = Some(
            match &c {
                Classification::Invariant => "invariant",
                Classification::Nonvariant => "nonvariant",
                Classification::Neither(_) => "neither",
            }
            .into(),
        );
        let image = map.image_of(xbar);
        let ok = match c {
            Classification::Invariant => image == [xbar],
            Classification::Nonvariant => image.is_empty(),
            Classification::Neither(_) => false,
        };
        if !ok {
            check.violation = Some(format!("image of x̄ is {image:?}, expected a subset of [{xbar}]"));
        }
    }
    Ok(check)
}

/// The interval map `Φ(x) = [0, x]` on `points + 1` evenly spaced points of
/// `[0, 1]` under the `remark46` quasi-metric, with the trace `x_n = 1/n`
/// (`n = 1..=terms`) rounded to the nearest grid point.
pub fn discretized_remark(points: usize, terms: usize) -> Result<(FiniteQuasiMetricSpace, ExtensionalMap, Vec<usize>)> {
    let k = points.max(1);
    let grid: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
    let space = crate::qspace::tabulate(&ScalarSpace::new(BuiltinMetric::Remark46), &grid)?;
    let map = ExtensionalMap::new((0..=k).map(|i| (0..=i).collect()).collect())?;
    let trace = (1..=terms)
        .map(|n| ((k as f64) / n as f64).round() as usize)
        .collect();
    Ok((space, map, trace))
}
