use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qspace::{PointValue, QuasiMetric};
use crate::setmap::{ExtReal, Image, SetValuedMap, Utility};

/// Geometric slack `s(n) = scale * ratio^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackSchedule {
    pub scale: f64,
    pub ratio: f64,
}

impl SlackSchedule {
    pub fn new(scale: f64, ratio: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::param("scale", format!("must be positive, got {scale}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::param("ratio", format!("must lie in (0, 1), got {ratio}")));
        }
        Ok(SlackSchedule { scale, ratio })
    }

    pub fn at(&self, n: usize) -> f64 {
        self.scale * self.ratio.powi(n.min(i32::MAX as usize) as i32)
    }
}

impl Default for SlackSchedule {
    /// `s(n) = 2^-n`.
    fn default() -> Self {
        SlackSchedule { scale: 1.0, ratio: 0.5 }
    }
}

type Chooser<P> = Arc<dyn Fn(&P, &Image<P>, usize) -> Option<P> + Send + Sync>;

/// How the next iterate is picked from `Φ(x_n)`.
///
/// Ties inside the slack band go to the point maximizing `q(x_n, ·)`
/// (near-sup) or minimizing `φ` (near-inf), then to the least point.
#[derive(Clone)]
pub enum SelectionRule<P> {
    NearSup { slack: SlackSchedule },
    NearInf { utility: Utility<P>, slack: SlackSchedule },
    /// Must return a member of the image, or `None` to stop.
    Custom { name: String, chooser: Chooser<P> },
}

impl<P> fmt::Debug for SelectionRule<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionRule::NearSup { slack } => f.debug_struct("NearSup").field("slack", slack).finish(),
            SelectionRule::NearInf { slack, .. } => f.debug_struct("NearInf").field("slack", slack).finish(),
            SelectionRule::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl<P: PointValue> SelectionRule<P> {
    pub fn near_sup() -> Self {
        SelectionRule::NearSup {
            slack: SlackSchedule::default(),
        }
    }

    pub fn near_inf(utility: Utility<P>) -> Self {
        SelectionRule::NearInf {
            utility,
            slack: SlackSchedule::default(),
        }
    }

    pub fn custom(name: impl Into<String>, chooser: impl Fn(&P, &Image<P>, usize) -> Option<P> + Send + Sync + 'static) -> Self {
        SelectionRule::Custom {
            name: name.into(),
            chooser: Arc::new(chooser),
        }
    }

    pub fn with_slack(self, slack: SlackSchedule) -> Self {
        match self {
            SelectionRule::NearSup { .. } => SelectionRule::NearSup { slack },
            SelectionRule::NearInf { utility, .. } => SelectionRule::NearInf { utility, slack },
            c => c,
        }
    }

    pub fn slack(&self, n: usize) -> Option<f64> {
        match self {
            SelectionRule::NearSup { slack } | SelectionRule::NearInf { slack, .. } => Some(slack.at(n)),
            SelectionRule::Custom { .. } => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            SelectionRule::NearSup { .. } => "near_sup".into(),
            SelectionRule::NearInf { .. } => "near_inf".into(),
            SelectionRule::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    pub fn tie_break(&self) -> &'static str {
        match self {
            SelectionRule::NearSup { .. } => "max q(x_n, u), then least point",
            SelectionRule::NearInf { .. } => "min φ(u), then least point",
            SelectionRule::Custom { .. } => "chooser",
        }
    }
}

/// Result of one selection step.
#[derive(Clone, Debug, PartialEq)]
pub enum Selection<P> {
    Next {
        point: P,
        /// `q(x, u)` for near-sup, `φ(u)` for near-inf.
        value: Option<f64>,
        /// The sup (near-sup) or inf (near-inf) the choice was measured against.
        bound: Option<f64>,
        exact: bool,
    },
    Stop,
}

fn ext_f64(v: ExtReal) -> f64 {
    match v {
        ExtReal::NegInf => f64::NEG_INFINITY,
        ExtReal::Finite(t) => t,
        ExtReal::PosInf => f64::INFINITY,
    }
}

/// Picks `x_{n+1}` from `Φ(x)` under `rule`, or signals a stop on an empty
/// image.
pub fn select_next<S, M>(map: &M, space: &S, x: &S::Point, rule: &SelectionRule<S::Point>, n: usize, grid: usize) -> Result<Selection<S::Point>>
where
    S: QuasiMetric + ?Sized,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    if !space.contains(x) {
        return Err(crate::qspace::outside(space, x));
    }
    let image = map.image(x)?;
    if image.is_empty() {
        return Ok(Selection::Stop);
    }
    match rule {
        SelectionRule::NearSup { .. } => {
            let sup = image.sup_distance(space, x, grid)?;
            match sup.argmax {
                Some(u) => Ok(Selection::Next {
                    value: Some(space.distance(x, &u)?),
                    point: u,
                    bound: Some(sup.value),
                    exact: sup.exact,
                }),
                None => Err(Error::ImageNotComputable("no member found to select".into())),
            }
        }
        SelectionRule::NearInf { utility, .. } => {
            let pts = image.probe_points(grid);
            let mut best: Option<(ExtReal, &S::Point)> = None;
            for u in &pts {
                let v = utility.eval(u);
                best = match best {
                    Some((bv, bu))
                        if matches!(bv.partial_cmp(&v), Some(Ordering::Less))
                            || (bv == v && bu.tie_cmp(u) != Ordering::Greater) =>
                    {
                        Some((bv, bu))
                    }
                    _ => Some((v, u)),
                };
            }
            match best {
                None => Err(Error::ImageNotComputable("no member found to select".into())),
                Some((ExtReal::PosInf, u)) => Err(Error::InfiniteUtility {
                    point: space.describe(u),
                }),
                Some((v, u)) => Ok(Selection::Next {
                    point: u.clone(),
                    value: Some(ext_f64(v)),
                    bound: Some(ext_f64(v)),
                    exact: image.exact_members().is_some(),
                }),
            }
        }
        SelectionRule::Custom { chooser, .. } => match chooser(x, &image, n) {
            None => Ok(Selection::Stop),
            Some(u) => {
                if !map.member(x, &u)? {
                    return Err(Error::NotPicard { step: n });
                }
                Ok(Selection::Next {
                    value: Some(space.distance(x, &u)?),
                    point: u,
                    bound: None,
                    exact: image.is_exact(),
                })
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspace::{BuiltinMetric, FiniteQuasiMetricSpace, Interval, ScalarSpace};
    use crate::setmap::{FinitePreorder, IdentityMap, IntervalMap, DEFAULT_GRID};

    #[test]
    fn slack_schedule() {
        let s = SlackSchedule::default();
        assert_eq!((s.at(0), s.at(1), s.at(10)), (1.0, 0.5, 1.0 / 1024.0));
        assert_eq!(SlackSchedule::new(3.0, 0.1).unwrap().at(2), 3.0 * 0.1 * 0.1);
        assert!(SlackSchedule::new(1.0, 1.0).is_err());
        assert!(SlackSchedule::new(0.0, 0.5).is_err());
    }

    #[test]
    fn remark_near_sup_from_half() {
        let s = ScalarSpace::new(BuiltinMetric::Remark46);
        let m = IntervalMap::zero_to_x(Interval::new(0.0, 1.0));
        let rule = SelectionRule::near_sup().with_slack(SlackSchedule::new(0.25, 0.5).unwrap());
        let sel = select_next(&m, &s, &0.5, &rule, 0, DEFAULT_GRID).unwrap();
        assert_eq!(
            sel,
            Selection::Next {
                point: 0.0,
                value: Some(0.5),
                bound: Some(0.5),
                exact: true
            }
        );
    }

    #[test]
    fn identity_returns_the_point() {
        let s = ScalarSpace::new(BuiltinMetric::Sorgenfrey);
        let m = IdentityMap::new(s.clone());
        match select_next(&m, &s, &0.7, &SelectionRule::near_sup(), 3, DEFAULT_GRID).unwrap() {
            Selection::Next { point, bound, .. } => assert_eq!((point, bound), (0.7, Some(0.0))),
            Selection::Stop => panic!("identity image is never empty"),
        }
    }

    #[test]
    fn near_inf_on_chain() {
        // a ⪯ b ⪯ c with φ = rank
        let p = FinitePreorder::from_edges(3, &[(0, 1), (1, 2)], true).unwrap();
        let s = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]).unwrap();
        let rule = SelectionRule::near_inf(Utility::real(|i: &usize| *i as f64));
        match select_next(&p.level_set_map(), &s, &2, &rule, 0, DEFAULT_GRID).unwrap() {
            Selection::Next { point, .. } => assert_eq!(point, 0),
            Selection::Stop => panic!(),
        }
    }

    #[test]
    fn empty_image_stops_and_bad_chooser_errors() {
        let s = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = crate::setmap::ExtensionalMap::new(vec![vec![], vec![1]]).unwrap();
        assert_eq!(select_next(&m, &s, &0, &SelectionRule::near_sup(), 0, 11).unwrap(), Selection::Stop);
        let bad = SelectionRule::custom("zero", |_: &usize, _: &Image<usize>, _| Some(0));
        assert!(matches!(select_next(&m, &s, &1, &bad, 4, 11), Err(Error::NotPicard { step: 4 })));
    }
}
