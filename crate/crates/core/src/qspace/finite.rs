//! Finite quasi-metric spaces given by a distance matrix.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{outside, QuasiMetric};
use crate::diagnostics::{ConditionEntry, ConditionReport, Mode, System, Witness};
use crate::error::{Error, Result};

/// `n` labelled points with an `n × n` matrix of nonnegative distances.
///
/// Construction only checks the shape and sign of the matrix; the zero
/// diagonal and triangle inequality are verified by [`check_axioms`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FiniteDoc", into = "FiniteDoc")]
pub struct FiniteQuasiMetricSpace {
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct FiniteDoc {
    points: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<FiniteDoc> for FiniteQuasiMetricSpace {
    type Error = Error;

    fn try_from(doc: FiniteDoc) -> Result<Self> {
        FiniteQuasiMetricSpace::new(doc.points, doc.matrix)
    }
}

impl From<FiniteQuasiMetricSpace> for FiniteDoc {
    fn from(s: FiniteQuasiMetricSpace) -> Self {
        FiniteDoc {
            points: s.labels,
            matrix: s.matrix,
        }
    }
}

impl FiniteQuasiMetricSpace {
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::MalformedMatrix("no points".into()));
        }
        if matrix.len() != n {
            return Err(Error::MalformedMatrix(format!(
                "{} rows for {n} points",
                matrix.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() || *v < 0.0 {
                    return Err(Error::MalformedMatrix(format!(
                        "entry ({i}, {j}) = {v} is not a nonnegative real"
                    )));
                }
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::MalformedMatrix(format!("duplicate label `{l}`")));
            }
        }
        Ok(FiniteQuasiMetricSpace { labels, matrix })
    }

    /// Points labelled `x0, x1, ...`.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| format!("x{i}")).collect();
        Self::new(labels, matrix)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("finite space serializes")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// Unchecked `q(i, j)`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..i).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    /// The conjugate space as an explicit matrix (the transpose).
    pub fn transposed(&self) -> Self {
        let n = self.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| self.matrix[j][i]).collect()).collect();
        FiniteQuasiMetricSpace {
            labels: self.labels.clone(),
            matrix,
        }
    }
}

impl QuasiMetric for FiniteQuasiMetricSpace {
    type Point = usize;

    fn distance(&self, x: &usize, y: &usize) -> Result<f64> {
        if *x >= self.len() {
            return Err(outside(self, x));
        }
        if *y >= self.len() {
            return Err(outside(self, y));
        }
        Ok(self.matrix[*x][*y])
    }

    fn contains(&self, x: &usize) -> bool {
        *x < self.len()
    }

    fn points(&self) -> Option<Vec<usize>> {
        Some((0..self.len()).collect())
    }

    fn point_to_json(&self, x: &usize) -> Value {
        match self.labels.get(*x) {
            Some(l) => Value::String(l.clone()),
            None => Value::from(*x),
        }
    }

    /// Accepts a label string or a point index.
    fn point_from_json(&self, v: &Value) -> Result<usize> {
        match v {
            Value::String(s) => self.index_of(s).ok_or_else(|| Error::UnknownLabel(s.clone())),
            Value::Number(n) => match n.as_u64() {
                Some(i) if (i as usize) < self.len() => Ok(i as usize),
                _ => Err(Error::PointOutsideUniverse {
                    point: n.to_string(),
                }),
            },
            other => Err(Error::PointOutsideUniverse {
                point: other.to_string(),
            }),
        }
    }

    fn describe(&self, x: &usize) -> String {
        self.labels.get(*x).cloned().unwrap_or_else(|| x.to_string())
    }
}

/// Exact axiom check over all points and all `n³` triples.
///
/// Conditions: `zero_diagonal`, `triangle`. Informational: `separation`
/// (`q(x,y) = 0 = q(y,x)` implies `x = y`), `point_separation`
/// (`q(x,y) = 0` implies `x = y`) and `symmetry`. Witnesses are the first
/// violation in lexicographic order.
pub fn check_axioms(space: &FiniteQuasiMetricSpace) -> ConditionReport {
    let n = space.len();
    let lbl = |i: usize| space.point_to_json(&i);

    let diag = (0..n)
        .find(|&i| space.d(i, i) != 0.0)
        .map(|i| Witness::new("q(x, x) != 0").points([lbl(i)]).values([space.d(i, i)]));

    let mut triangle = None;
    'outer: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (xz, xy, yz) = (space.d(x, z), space.d(x, y), space.d(y, z));
                if xz > xy + yz {
                    triangle = Some(
                        Witness::new("q(x, z) > q(x, y) + q(y, z)")
                            .points([lbl(x), lbl(y), lbl(z)])
                            .values([xz, xy, yz]),
                    );
                    break 'outer;
                }
            }
        }
    }

    let pairs = || (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|(x, y)| x != y);
    let separation = pairs()
        .find(|&(x, y)| space.d(x, y) == 0.0 && space.d(y, x) == 0.0)
        .map(|(x, y)| Witness::new("q(x, y) = q(y, x) = 0 for x != y").points([lbl(x), lbl(y)]));
    let point_separation = pairs()
        .find(|&(x, y)| space.d(x, y) == 0.0)
        .map(|(x, y)| Witness::new("q(x, y) = 0 for x != y").points([lbl(x), lbl(y)]));
    let symmetry = pairs()
        .find(|&(x, y)| space.d(x, y) != space.d(y, x))
        .map(|(x, y)| {
            Witness::new("q(x, y) != q(y, x)")
                .points([lbl(x), lbl(y)])
                .values([space.d(x, y), space.d(y, x)])
        });

    let entry = |label: &str, w: Option<Witness>| {
        ConditionEntry::from_check(label, Mode::Exact, 0.0, w.map_or(Ok(()), Err))
    };
    ConditionReport::new(
        System::Axioms,
        vec![entry("zero_diagonal", diag), entry("triangle", triangle)],
    )
    .with_informational(vec![
        entry("separation", separation),
        entry("point_separation", point_separation),
        entry("symmetry", symmetry),
    ])
}

/// Restricts any quasi-metric to a finite list of points.
pub fn tabulate<S: QuasiMetric + ?Sized>(space: &S, points: &[S::Point]) -> Result<FiniteQuasiMetricSpace> {
    let labels = points
        .iter()
        .map(|p| match space.point_to_json(p) {
            Value::String(s) => s,
            v => v.to_string(),
        })
        .collect();
    let matrix = points
        .iter()
        .map(|x| points.iter().map(|y| space.distance(x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    FiniteQuasiMetricSpace::new(labels, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Status;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn two_point_asymmetric_space_passes() {
        let s = FiniteQuasiMetricSpace::new(labels(2), vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let r = check_axioms(&s);
        assert_eq!(r.overall, Status::Holds);
        assert_eq!(r.status("symmetry"), Some(Status::Fails));
        assert_eq!(r.status("separation"), Some(Status::Holds));
    }

    #[test]
    fn one_sided_zero_keeps_separation() {
        // q(x1, x0) = 0 but q(x0, x1) = 1: the two-sided separation property holds,
        // the one-sided one does not.
        let s = FiniteQuasiMetricSpace::new(labels(2), vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let r = check_axioms(&s);
        assert_eq!(r.overall, Status::Holds);
        assert_eq!(r.status("separation"), Some(Status::Holds));
        let ps = r.get("point_separation").unwrap();
        assert_eq!(ps.status, Status::Fails);
        assert_eq!(ps.witness.as_ref().unwrap().points, vec![Value::from("x1"), Value::from("x0")]);
    }

    #[test]
    fn triangle_violation_witness() {
        let s = FiniteQuasiMetricSpace::new(
            labels(3),
            vec![vec![0.0, 1.0, 5.0], vec![3.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap();
        let r = check_axioms(&s);
        assert_eq!(r.overall, Status::Fails);
        let w = r.get("triangle").unwrap().witness.clone().unwrap();
        assert_eq!(w.points, vec![Value::from("x0"), Value::from("x1"), Value::from("x2")]);
        assert_eq!(w.values, vec![5.0, 1.0, 1.0]);
    }

    #[test]
    fn nonzero_diagonal_fails() {
        let s = FiniteQuasiMetricSpace::new(labels(2), vec![vec![0.5, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(check_axioms(&s).status("zero_diagonal"), Some(Status::Fails));
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(matches!(
            FiniteQuasiMetricSpace::new(labels(2), vec![vec![0.0, -1.0], vec![1.0, 0.0]]),
            Err(Error::MalformedMatrix(_))
        ));
        assert!(FiniteQuasiMetricSpace::new(labels(2), vec![vec![0.0, 1.0]]).is_err());
        assert!(FiniteQuasiMetricSpace::new(labels(2), vec![vec![0.0], vec![1.0, 0.0]]).is_err());
        assert!(FiniteQuasiMetricSpace::new(vec!["a".into(), "a".into()], vec![vec![0.0; 2]; 2]).is_err());
        assert!(FiniteQuasiMetricSpace::from_json(r#"{"points": ["a"], "matrix": [[0, 1]]}"#).is_err());
    }

    #[test]
    fn json_round_trip_and_labels() {
        let text = r#"{"points": ["a", "b"], "matrix": [[0, 1.5], [2, 0]]}"#;
        let s = FiniteQuasiMetricSpace::from_json(text).unwrap();
        assert_eq!(s.distance(&0, &1).unwrap(), 1.5);
        assert_eq!(s.point_from_json(&Value::from("b")).unwrap(), 1);
        assert_eq!(s.point_from_json(&Value::from(1)).unwrap(), 1);
        assert!(s.point_from_json(&Value::from("c")).is_err());
        let back = FiniteQuasiMetricSpace::from_json(&s.to_json().to_string()).unwrap();
        assert_eq!(back, s);
        assert!(s.distance(&0, &2).is_err());
    }

    #[test]
    fn tabulate_restricts_builtin_metric() {
        use crate::qspace::{BuiltinMetric, ScalarSpace};
        let s = ScalarSpace::new(BuiltinMetric::Remark46);
        let t = tabulate(&s, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(t.d(2, 1), 0.5);
        assert_eq!(t.d(1, 2), 1.0);
        assert_eq!(check_axioms(&t).overall, Status::Holds);
    }
}
