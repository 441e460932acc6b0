use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Which named condition system a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum System {
    A,
    B,
    C,
    E,
    F,
    #[serde(rename = "TAU")]
    Tau,
    #[serde(rename = "AXIOMS")]
    Axioms,
    #[serde(rename = "PREORDER")]
    Preorder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Undetermined,
}

/// Exact verdicts cover the whole universe; sampled ones only the points or
/// traces that were supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

impl Mode {
    pub fn from_exact(exact: bool) -> Self {
        if exact {
            Mode::Exact
        } else {
            Mode::Sampled
        }
    }

    pub fn and(self, other: Mode) -> Mode {
        if self == Mode::Exact && other == Mode::Exact {
            Mode::Exact
        } else {
            Mode::Sampled
        }
    }
}

/// Concrete evidence for a failed condition.
///
/// `steps` are trace indices, `points` serialized universe points and
/// `values` the numbers that violate the condition. `walk` spells out a
/// Picard walk (for cyclic witnesses, a closed walk repeated forever).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default)]
    pub steps: Vec<usize>,
    #[serde(default)]
    pub points: Vec<Value>,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub walk: Vec<Value>,
}

impl Witness {
    pub fn new(detail: impl Into<String>) -> Self {
        Witness {
            detail: detail.into(),
            ..Default::default()
        }
    }

    pub fn steps(mut self, steps: impl IntoIterator<Item = usize>) -> Self {
        self.steps.extend(steps);
        self
    }

    pub fn points(mut self, points: impl IntoIterator<Item = Value>) -> Self {
        self.points.extend(points);
        self
    }

    pub fn values(mut self, values: impl IntoIterator<Item = f64>) -> Self {
        self.values.extend(values);
        self
    }

    pub fn walk(mut self, walk: impl IntoIterator<Item = Value>) -> Self {
        self.walk.extend(walk);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub label: String,
    pub status: Status,
    pub mode: Mode,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionEntry {
    pub fn holds(label: impl Into<String>, mode: Mode, tolerance: f64) -> Self {
        ConditionEntry {
            label: label.into(),
            status: Status::Holds,
            mode,
            witness: None,
            tolerance,
            note: None,
        }
    }

    pub fn fails(label: impl Into<String>, mode: Mode, tolerance: f64, witness: Witness) -> Self {
        ConditionEntry {
            label: label.into(),
            status: Status::Fails,
            mode,
            witness: Some(witness),
            tolerance,
            note: None,
        }
    }

    pub fn undetermined(label: impl Into<String>, tolerance: f64, reason: impl Into<String>) -> Self {
        ConditionEntry {
            label: label.into(),
            status: Status::Undetermined,
            mode: Mode::Sampled,
            witness: None,
            tolerance,
            note: Some(reason.into()),
        }
    }

    /// `Ok(())` holds, `Err(witness)` fails.
    pub fn from_check(
        label: impl Into<String>,
        mode: Mode,
        tolerance: f64,
        check: Result<(), Witness>,
    ) -> Self {
        match check {
            Ok(()) => ConditionEntry::holds(label, mode, tolerance),
            Err(w) => ConditionEntry::fails(label, mode, tolerance, w),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn is_exact_holds(&self) -> bool {
        self.status == Status::Holds && self.mode == Mode::Exact
    }
}

/// Per-condition verdicts for one condition system.
///
/// `overall` only summarizes `conditions`; `informational` entries (such as
/// the optional separation flag) are reported alongside without affecting it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub system: System,
    pub overall: Status,
    pub conditions: Vec<ConditionEntry>,
    #[serde(default)]
    pub informational: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn new(system: System, conditions: Vec<ConditionEntry>) -> Self {
        let overall = summarize(&conditions);
        ConditionReport {
            system,
            overall,
            conditions,
            informational: Vec::new(),
        }
    }

    pub fn with_informational(mut self, entries: Vec<ConditionEntry>) -> Self {
        self.informational = entries;
        self
    }

    pub fn get(&self, label: &str) -> Option<&ConditionEntry> {
        self.conditions
            .iter()
            .chain(&self.informational)
            .find(|c| c.label == label)
    }

    pub fn status(&self, label: &str) -> Option<Status> {
        self.get(label).map(|c| c.status)
    }

    pub fn holds(&self, label: &str) -> bool {
        self.get(label).is_some_and(|c| c.is_holds())
    }

    pub fn holds_exact(&self, label: &str) -> bool {
        self.get(label).is_some_and(|c| c.is_exact_holds())
    }

    pub fn all_hold_exact(&self, labels: &[&str]) -> bool {
        labels.iter().all(|l| self.holds_exact(l))
    }

    /// Every condition holds in exact mode.
    pub fn holds_exactly(&self) -> bool {
        self.conditions.iter().all(|c| c.is_exact_holds())
    }

    pub fn first_failure(&self) -> Option<&ConditionEntry> {
        self.conditions.iter().find(|c| c.status != Status::Holds)
    }
}

fn summarize(conditions: &[ConditionEntry]) -> Status {
    if conditions.iter().all(|c| c.status == Status::Holds) {
        Status::Holds
    } else if conditions.iter().any(|c| c.status == Status::Fails) {
        Status::Fails
    } else {
        Status::Undetermined
    }
}

/// Outcome of a sequence-level check such as a Cauchy or convergence test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    /// The discovered index `N` from which the bound holds, when it does.
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn holds(tolerance: f64, index: usize) -> Self {
        Verdict {
            status: Status::Holds,
            witness: None,
            tolerance,
            index: Some(index),
            note: None,
        }
    }

    pub fn fails(tolerance: f64, witness: Witness) -> Self {
        Verdict {
            status: Status::Fails,
            witness: Some(witness),
            tolerance,
            index: None,
            note: None,
        }
    }

    pub fn undetermined(tolerance: f64, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Undetermined,
            witness: None,
            tolerance,
            index: None,
            note: Some(reason.into()),
        }
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_tracks_conditions_only() {
        let r = ConditionReport::new(
            System::E,
            vec![
                ConditionEntry::holds("E1", Mode::Exact, 0.0),
                ConditionEntry::holds("E2", Mode::Exact, 0.0),
            ],
        )
        .with_informational(vec![ConditionEntry::fails(
            "separation",
            Mode::Exact,
            0.0,
            Witness::new("x"),
        )]);
        assert_eq!(r.overall, Status::Holds);
        assert_eq!(r.status("separation"), Some(Status::Fails));

        let r = ConditionReport::new(
            System::E,
            vec![
                ConditionEntry::holds("E1", Mode::Exact, 0.0),
                ConditionEntry::undetermined("E4", 0.0, "no universe"),
            ],
        );
        assert_eq!(r.overall, Status::Undetermined);
    }

    #[test]
    fn entry_json_shape() {
        let e = ConditionEntry::holds("E2", Mode::Exact, 1e-6);
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"label": "E2", "status": "holds", "mode": "exact", "witness": null, "tolerance": 1e-6})
        );
    }
}
