use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::qspace::{Interval, PointValue, QuasiMetric};

/// Default grid size for sup evaluation over interval images without a closed form.
pub const DEFAULT_GRID: usize = 1001;

/// The value of a set `Φ(x)` as far as it can be represented.
///
/// `Finite` and `Interval` are exact. `Sampled` holds only the members a
/// sampler produced; conclusions drawn from it are never exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Image<P> {
    Finite(Vec<P>),
    Interval(Interval),
    Sampled(Vec<P>),
}

/// Outcome of a subset test between two images.
#[derive(Clone, Debug, PartialEq)]
pub enum Inclusion<P> {
    Yes,
    /// A member of the left image missing from the right one.
    No(P),
    Unknown,
}

/// `sup { q(x, u) : u in Φ(x) }` together with a maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct SupValue<P> {
    pub value: f64,
    pub argmax: Option<P>,
    pub exact: bool,
}

pub(crate) fn normalize<P: PointValue>(mut pts: Vec<P>) -> Vec<P> {
    pts.sort_by(|a, b| a.tie_cmp(b));
    pts.dedup_by(|a, b| a.tie_cmp(b) == Ordering::Equal);
    pts
}

impl<P: PointValue> Image<P> {
    pub fn finite(points: Vec<P>) -> Self {
        Image::Finite(normalize(points))
    }

    pub fn sampled(points: Vec<P>) -> Self {
        Image::Sampled(normalize(points))
    }

    pub fn empty() -> Self {
        Image::Finite(Vec::new())
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Image::Sampled(_))
    }

    /// True only when the image is known to be empty.
    pub fn is_empty(&self) -> bool {
        match self {
            Image::Finite(v) => v.is_empty(),
            Image::Interval(iv) => iv.is_empty(),
            Image::Sampled(_) => false,
        }
    }

    /// Listed members, when the representation lists them.
    pub fn listed(&self) -> Option<&[P]> {
        match self {
            Image::Finite(v) | Image::Sampled(v) => Some(v),
            Image::Interval(_) => None,
        }
    }

    /// Exact membership; `None` for sampled images, which cannot rule points out.
    pub fn contains(&self, u: &P) -> Option<bool> {
        match self {
            Image::Finite(v) => Some(v.iter().any(|p| p == u)),
            Image::Interval(iv) => Some(u.as_scalar().is_some_and(|t| iv.contains(t))),
            Image::Sampled(v) => v.iter().any(|p| p == u).then_some(true),
        }
    }

    /// Finite stand-in used where an interval has to be enumerated.
    pub fn probe_points(&self, grid: usize) -> Vec<P> {
        match self {
            Image::Finite(v) | Image::Sampled(v) => v.clone(),
            Image::Interval(iv) => iv.grid(grid).into_iter().filter_map(P::from_scalar).collect(),
        }
    }

    /// Whether `self ⊆ other`, with a witness when it is not.
    pub fn inclusion(&self, other: &Image<P>) -> Inclusion<P> {
        match (self, other) {
            (Image::Sampled(_), _) | (_, Image::Sampled(_)) => Inclusion::Unknown,
            (Image::Finite(a), b) => match a.iter().find(|u| b.contains(u) != Some(true)) {
                Some(u) => Inclusion::No(u.clone()),
                None => Inclusion::Yes,
            },
            (Image::Interval(a), Image::Interval(b)) => {
                if a.is_empty() || (b.lo <= a.lo && a.hi <= b.hi) {
                    Inclusion::Yes
                } else {
                    let t = if a.lo < b.lo || a.lo > b.hi { a.lo } else { a.hi };
                    P::from_scalar(t).map_or(Inclusion::Unknown, Inclusion::No)
                }
            }
            (Image::Interval(a), Image::Finite(b)) => {
                if a.is_empty() {
                    return Inclusion::Yes;
                }
                // one of |b| + 1 distinct points of `a` is missing from `b`
                let probe = if a.lo == a.hi { vec![a.lo] } else { a.grid(b.len() + 1) };
                match probe
                    .into_iter()
                    .filter_map(P::from_scalar)
                    .find(|u| !b.contains(u))
                {
                    Some(u) => Inclusion::No(u),
                    None => Inclusion::Yes,
                }
            }
        }
    }

    /// Exact intersection of two exact images.
    pub fn intersect(&self, other: &Image<P>) -> Result<Image<P>> {
        match (self, other) {
            (Image::Interval(a), Image::Interval(b)) => Ok(Image::Interval(a.intersect(b))),
            (Image::Finite(a), b) | (b, Image::Finite(a)) if b.is_exact() => Ok(Image::Finite(
                a.iter().filter(|u| b.contains(u) == Some(true)).cloned().collect(),
            )),
            _ => Err(Error::UnrepresentableImage(
                "intersection involving a sampled image".into(),
            )),
        }
    }

    /// Members as a finite list, if the image is exact and finite (a
    /// degenerate interval counts as a single point).
    pub fn exact_members(&self) -> Option<Vec<P>> {
        match self {
            Image::Finite(v) => Some(v.clone()),
            Image::Interval(iv) if iv.is_empty() => Some(Vec::new()),
            Image::Interval(iv) if iv.lo == iv.hi => P::from_scalar(iv.lo).map(|p| vec![p]),
            _ => None,
        }
    }

    /// `sup { q(x, u) : u in self }`.
    ///
    /// Finite images are maximized exactly with ties broken toward the least
    /// point. Intervals use the space's closed form when it has one and fall
    /// back to `grid` evenly spaced points (reported inexact). The sup over an
    /// empty image is `0` with no maximizer.
    pub fn sup_distance<S>(&self, space: &S, x: &P, grid: usize) -> Result<SupValue<P>>
    where
        S: QuasiMetric<Point = P> + ?Sized,
    {
        match self {
            Image::Finite(v) => max_over(space, x, v, true),
            Image::Sampled(v) => max_over(space, x, v, false),
            Image::Interval(iv) => {
                let iv = match space.scalar_extent() {
                    Some(ext) => iv.intersect(&ext),
                    None => *iv,
                };
                if iv.is_empty() {
                    return Ok(SupValue {
                        value: 0.0,
                        argmax: None,
                        exact: true,
                    });
                }
                if let Some((value, arg)) = space.sup_over_interval(x, &iv) {
                    return Ok(SupValue {
                        value,
                        argmax: Some(arg),
                        exact: true,
                    });
                }
                let pts: Vec<P> = iv
                    .grid(grid)
                    .into_iter()
                    .filter_map(P::from_scalar)
                    .filter(|p| space.contains(p))
                    .collect();
                if pts.is_empty() {
                    return Err(Error::ImageNotComputable(format!(
                        "interval [{}, {}] has no closed-form sup and cannot be gridded",
                        iv.lo, iv.hi
                    )));
                }
                max_over(space, x, &pts, false)
            }
        }
    }
}

fn max_over<S, P>(space: &S, x: &P, pts: &[P], exact: bool) -> Result<SupValue<P>>
where
    P: PointValue,
    S: QuasiMetric<Point = P> + ?Sized,
{
    let mut best: Option<(f64, &P)> = None;
    for u in pts {
        let d = space.distance(x, u)?;
        best = match best {
            Some((bd, bu)) if bd > d || (bd == d && bu.tie_cmp(u) != Ordering::Greater) => Some((bd, bu)),
            _ => Some((d, u)),
        };
    }
    Ok(match best {
        Some((value, u)) => SupValue {
            value,
            argmax: Some(u.clone()),
            exact,
        },
        None => SupValue {
            value: 0.0,
            argmax: None,
            exact,
        },
    })
}
