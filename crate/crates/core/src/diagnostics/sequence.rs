use crate::error::{Error, Result};
use crate::qspace::{Direction, QuasiMetric};

use super::report::{Verdict, Witness};

/// Default tail-window length for convergence and limit detection.
pub const DEFAULT_WINDOW: usize = 10;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Finite-horizon Cauchy test.
///
/// Finds the least index `N` such that every pair `N <= n < m` of the trace
/// has distance below `epsilon` (forward `q(x_n, x_m)`, backward
/// `q(x_m, x_n)`). The verdict holds when that tail covers at least two
/// entries and a quarter of the trace, fails when even the last pair
/// violates the bound, and is undetermined in between or for traces shorter
/// than two.
pub fn is_cauchy<S: QuasiMetric + ?Sized>(
    trace: &[S::Point],
    space: &S,
    direction: Direction,
    epsilon: f64,
) -> Result<Verdict> {
    check_epsilon(epsilon)?;
    let len = trace.len();
    if len < 2 {
        return Ok(Verdict::undetermined(epsilon, "trace shorter than two"));
    }
    // scan backward until some pair starting at n breaks the bound
    let mut n_min = len - 1;
    let mut violation = None;
    for n in (0..len - 1).rev() {
        let mut bad = None;
        for m in n + 1..len {
            let d = direction.measure(space, &trace[n], &trace[m])?;
            if !(d < epsilon) {
                bad = Some((m, d));
                break;
            }
        }
        match bad {
            None => n_min = n,
            Some((m, d)) => {
                violation = Some((n, m, d));
                break;
            }
        }
    }
    let tail = len - n_min;
    if let Some((n, m, d)) = violation {
        if n == len - 2 {
            let w = Witness::new("last pair violates the bound")
                .steps([n, m])
                .points([space.point_to_json(&trace[n]), space.point_to_json(&trace[m])])
                .values([d]);
            return Ok(Verdict::fails(epsilon, w));
        }
    }
    if tail >= 2 && tail >= len.div_ceil(4) {
        return Ok(Verdict::holds(epsilon, n_min));
    }
    Ok(Verdict::undetermined(
        epsilon,
        format!("bound holds only on the last {tail} of {len} entries"),
    ))
}

/// Tail-window convergence test toward `candidate`: forward `q(x_n, c)`,
/// backward `q(c, x_n)`, over the last `window` entries.
pub fn converges_to<S: QuasiMetric + ?Sized>(
    trace: &[S::Point],
    space: &S,
    candidate: &S::Point,
    direction: Direction,
    epsilon: f64,
    window: usize,
) -> Result<Verdict> {
    check_epsilon(epsilon)?;
    if !space.contains(candidate) {
        return Err(crate::qspace::outside(space, candidate));
    }
    let len = trace.len();
    if len < 2 || len < window {
        return Ok(Verdict::undetermined(
            epsilon,
            format!("trace of length {len} is shorter than the window {window}"),
        ));
    }
    let start = len - window.max(1);
    for (n, x) in trace.iter().enumerate().skip(start) {
        let d = direction.measure(space, x, candidate)?;
        if !(d < epsilon) {
            let w = Witness::new("tail distance to the candidate is not below epsilon")
                .steps([n])
                .points([space.point_to_json(x), space.point_to_json(candidate)])
                .values([d]);
            return Ok(Verdict::fails(epsilon, w));
        }
    }
    Ok(Verdict::holds(epsilon, start))
}
