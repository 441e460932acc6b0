use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use super::order::Utility;
use crate::error::{Error, Result};
use crate::qspace::{outside, QuasiMetric};

type TauFn<P> = Arc<dyn Fn(&P, &P) -> f64 + Send + Sync>;

/// A generalized distance `p` on a metric space `(X, d)`.
///
/// `weak` functions are only expected to satisfy τ1, τ3 and τ4; full ones
/// add lower semicontinuity (τ2).
#[derive(Clone)]
pub struct TauFunction<S: QuasiMetric> {
    base: S,
    p: TauFn<S::Point>,
    weak: bool,
}

impl<S: QuasiMetric + fmt::Debug> fmt::Debug for TauFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TauFunction")
            .field("base", &self.base)
            .field("weak", &self.weak)
            .finish()
    }
}

impl<S: QuasiMetric> TauFunction<S> {
    pub fn new(base: S, p: impl Fn(&S::Point, &S::Point) -> f64 + Send + Sync + 'static, weak: bool) -> Self {
        TauFunction {
            base,
            p: Arc::new(p),
            weak,
        }
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn is_weak(&self) -> bool {
        self.weak
    }

    pub fn p(&self, x: &S::Point, y: &S::Point) -> Result<f64> {
        for z in [x, y] {
            if !self.base.contains(z) {
                return Err(outside(&self.base, z));
            }
        }
        let v = (self.p)(x, y);
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::param("p", format!("value {v} is not a nonnegative real")));
        }
        Ok(v)
    }

    pub fn d(&self, x: &S::Point, y: &S::Point) -> Result<f64> {
        self.base.distance(x, y)
    }
}

/// The quasi-metric `q(x, y) = p(x, y)` for `x != y`, `q(x, x) = 0`.
#[derive(Clone, Debug)]
pub struct TauQuasiMetric<S: QuasiMetric> {
    tau: TauFunction<S>,
}

impl<S: QuasiMetric> TauQuasiMetric<S> {
    pub fn tau(&self) -> &TauFunction<S> {
        &self.tau
    }
}

impl<S: QuasiMetric> QuasiMetric for TauQuasiMetric<S> {
    type Point = S::Point;

    fn distance(&self, x: &S::Point, y: &S::Point) -> Result<f64> {
        let v = self.tau.p(x, y)?;
        Ok(if x == y { 0.0 } else { v })
    }

    fn contains(&self, x: &S::Point) -> bool {
        self.tau.base.contains(x)
    }

    fn points(&self) -> Option<Vec<S::Point>> {
        self.tau.base.points()
    }

    fn point_to_json(&self, x: &S::Point) -> Value {
        self.tau.base.point_to_json(x)
    }

    fn point_from_json(&self, v: &Value) -> Result<S::Point> {
        self.tau.base.point_from_json(v)
    }
}

/// Builds the quasi-metric induced by `p` after validating τ1 on every
/// triple of `validation` (all points of a finite base when `None`).
///
/// Comparisons are exact on finite bases and use tolerance `1e-12`
/// otherwise.
pub fn tau_to_quasimetric<S: QuasiMetric>(
    tau: TauFunction<S>,
    validation: Option<&[S::Point]>,
) -> Result<TauQuasiMetric<S>> {
    let listed = tau.base.points();
    let tol = if validation.is_none() && listed.is_some() { 0.0 } else { 1e-12 };
    let pts: Vec<S::Point> = match validation {
        Some(v) => v.to_vec(),
        None => listed.unwrap_or_default(),
    };
    for x in &pts {
        for y in &pts {
            let pxy = tau.p(x, y)?;
            for z in &pts {
                if tau.p(x, z)? > pxy + tau.p(y, z)? + tol {
                    return Err(Error::TauTriangleViolation {
                        x: tau.base.describe(x),
                        y: tau.base.describe(y),
                        z: tau.base.describe(z),
                    });
                }
            }
        }
    }
    Ok(TauQuasiMetric { tau })
}

/// `q(x, y) = |φ(x) - φ(y)|` on a finite base set.
#[derive(Clone, Debug)]
pub struct UtilityPseudoMetric<P> {
    base: Vec<P>,
    values: Vec<f64>,
    labels: Option<Vec<Value>>,
}

impl<P: crate::qspace::PointValue> UtilityPseudoMetric<P> {
    pub fn base(&self) -> &[P] {
        &self.base
    }

    pub fn value(&self, x: &P) -> Option<f64> {
        self.index(x).map(|i| self.values[i])
    }

    /// Reuses the point serialization of the space the base was taken from.
    pub fn with_labels_from<S: QuasiMetric<Point = P>>(mut self, space: &S) -> Self {
        self.labels = Some(self.base.iter().map(|p| space.point_to_json(p)).collect());
        self
    }

    fn index(&self, x: &P) -> Option<usize> {
        self.base.iter().position(|b| b == x)
    }
}

impl<P: crate::qspace::PointValue> QuasiMetric for UtilityPseudoMetric<P> {
    type Point = P;

    fn distance(&self, x: &P, y: &P) -> Result<f64> {
        let i = self.index(x).ok_or_else(|| outside(self, x))?;
        let j = self.index(y).ok_or_else(|| outside(self, y))?;
        Ok((self.values[i] - self.values[j]).abs())
    }

    fn contains(&self, x: &P) -> bool {
        self.index(x).is_some()
    }

    fn points(&self) -> Option<Vec<P>> {
        Some(self.base.clone())
    }

    fn point_to_json(&self, x: &P) -> Value {
        match (&self.labels, self.index(x)) {
            (Some(l), Some(i)) => l[i].clone(),
            _ => serde_json::to_value(x).unwrap_or(Value::Null),
        }
    }

    fn point_from_json(&self, v: &Value) -> Result<P> {
        if let Some(l) = &self.labels {
            if let Some(i) = l.iter().position(|w| w == v) {
                return Ok(self.base[i].clone());
            }
        }
        let p: P = serde_json::from_value(v.clone())?;
        if !self.contains(&p) {
            return Err(Error::PointOutsideUniverse { point: v.to_string() });
        }
        Ok(p)
    }
}

/// The pseudo-metric `|φ(x) - φ(y)|` on `base`; fails if `φ` is infinite at
/// a base point.
pub fn utility_pseudometric<P: crate::qspace::PointValue>(
    phi: &Utility<P>,
    base: &[P],
) -> Result<UtilityPseudoMetric<P>> {
    let values = base
        .iter()
        .map(|x| {
            phi.eval(x).finite().ok_or_else(|| Error::InfiniteUtility {
                point: format!("{x:?}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UtilityPseudoMetric {
        base: base.to_vec(),
        values,
        labels: None,
    })
}
