//! Seeded spot checks of the axioms on spaces too large to enumerate.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BuiltinMetric, FiniteQuasiMetricSpace, GaugeSpace, QuasiMetric, ScalarSpace};
use crate::diagnostics::{ConditionEntry, ConditionReport, Mode, System, Witness};
use crate::error::Result;

/// Half-width of the sampling box used for unbounded directions.
const SAMPLE_RADIUS: f64 = 10.0;

/// Spaces that can draw points uniformly from a bounded part of the universe.
pub trait SamplePoints: QuasiMetric {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;
}

impl SamplePoints for ScalarSpace {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let d = self.domain();
        let lo = d.lo.max(-SAMPLE_RADIUS);
        let hi = d.hi.min(SAMPLE_RADIUS);
        loop {
            let t = if self.metric() == BuiltinMetric::HalfLineLog && d.lo <= 0.0 {
                // log-uniform keeps ratios spread over several decades
                (rng.gen_range(-SAMPLE_RADIUS.ln()..hi.ln())).exp()
            } else {
                rng.gen_range(lo..=hi)
            };
            if d.contains(t) {
                return t;
            }
        }
    }
}

impl SamplePoints for GaugeSpace {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim())
            .map(|_| rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS))
            .collect()
    }
}

impl SamplePoints for FiniteQuasiMetricSpace {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.gen_range(0..self.len())
    }
}

/// Checks zero diagonal and the triangle inequality on `triples` seeded random
/// triples, up to absolute tolerance `tol`. Verdicts are sampled.
///
/// Each triple draws independent points; every fourth triple reuses `x` as `y`
/// or `z` so degenerate configurations are exercised as well.
pub fn check_axioms_sampled<S: SamplePoints>(
    space: &S,
    triples: usize,
    tol: f64,
    seed: u64,
) -> Result<ConditionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diag = None;
    let mut triangle = None;
    for i in 0..triples {
        let x = space.sample_point(&mut rng);
        let mut y = space.sample_point(&mut rng);
        let mut z = space.sample_point(&mut rng);
        match i % 8 {
            3 => y = x.clone(),
            7 => z = x.clone(),
            _ => {}
        }
        if diag.is_none() {
            let d = space.distance(&x, &x)?;
            if d.abs() > tol {
                diag = Some(Witness::new("q(x, x) != 0").points([space.point_to_json(&x)]).values([d]));
            }
        }
        if triangle.is_none() {
            let (xz, xy, yz) = (space.distance(&x, &z)?, space.distance(&x, &y)?, space.distance(&y, &z)?);
            if xz > xy + yz + tol {
                triangle = Some(
                    Witness::new("q(x, z) > q(x, y) + q(y, z)")
                        .points([space.point_to_json(&x), space.point_to_json(&y), space.point_to_json(&z)])
                        .values([xz, xy, yz]),
                );
            }
        }
        if diag.is_some() && triangle.is_some() {
            break;
        }
    }
    let entry = |label: &str, w: Option<Witness>| {
        ConditionEntry::from_check(label, Mode::Sampled, tol, w.map_or(Ok(()), Err))
            .with_note(format!("{triples} sampled triples, seed {seed}"))
    };
    Ok(ConditionReport::new(
        System::Axioms,
        vec![entry("zero_diagonal", diag), entry("triangle", triangle)],
    ))
}
