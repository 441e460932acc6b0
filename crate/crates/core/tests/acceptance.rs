//! Acceptance gate. Prints one PASS/FAIL line per criterion; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quasifix_core::diagnostics::{converges_to, is_cauchy, Status};
use quasifix_core::oracle::{property_sweep, random_instance, Profile, Property};
use quasifix_core::picard::{classify_point, find_invariant_point, Classification, Outcome, SearchConfig, SelectionRule};
use quasifix_core::qspace::{check_axioms_sampled, BuiltinMetric, Direction, GaugeSpace, Interval, QuasiMetric, ScalarSpace};
use quasifix_core::setmap::{IdentityMap, IntervalMap, SetValuedMap, DEFAULT_GRID};

const SWEEP_SEED: u64 = 1;
const SIZES: (usize, usize) = (2, 6);

struct Line {
    id: u8,
    name: &'static str,
    ok: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn run(id: u8, name: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Result<String, String>) -> Line {
    let t = Instant::now();
    let r = f();
    let elapsed = t.elapsed();
    let (mut ok, mut detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(l) = limit {
        if elapsed > l {
            ok = false;
            detail = format!("{detail}; over the {l:?} budget");
        }
    }
    Line {
        id,
        name,
        ok,
        detail,
        elapsed,
        limit,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn remark_golden() -> Result<String, String> {
    let s = ScalarSpace::new(BuiltinMetric::Remark46);
    let m = IntervalMap::zero_to_x(Interval::new(0.0, 1.0));
    let e = |e: quasifix_core::error::Error| e.to_string();

    // (a) sup over [0, x] of q(x, u) is x
    for i in 0..=1000 {
        let x = i as f64 / 1000.0;
        let sup = m.image(&x).map_err(e)?.sup_distance(&s, &x, DEFAULT_GRID).map_err(e)?;
        ensure(sup.exact && sup.value == x, || format!("(a) sup at {x} is {} (exact {})", sup.value, sup.exact))?;
    }

    // (b) harmonic trace
    let trace: Vec<f64> = (1..=100).map(|n| 1.0 / n as f64).collect();
    let c = is_cauchy(&trace, &s, Direction::Forward, 0.05).map_err(e)?;
    ensure(c.status == Status::Holds, || format!("(b) forward Cauchy at 0.05: {c:?}"))?;
    let v = converges_to(&trace, &s, &0.0, Direction::Forward, 0.05, 10).map_err(e)?;
    ensure(v.status == Status::Holds, || format!("(b) forward limit 0: {v:?}"))?;

    // (c) no backward convergence
    for x in &trace {
        let d = s.distance(&0.0, x).map_err(e)?;
        ensure(d == 1.0, || format!("(c) q(0, {x}) = {d}"))?;
    }
    let b = converges_to(&trace, &s, &0.0, Direction::Backward, 0.05, 10).map_err(e)?;
    ensure(b.status == Status::Fails, || format!("(c) backward limit should fail: {b:?}"))?;

    // (d) search from 1
    let r = find_invariant_point(&m, &s, &1.0, &SelectionRule::near_sup(), &SearchConfig::for_space(&s)).map_err(e)?;
    ensure(matches!(r.outcome, Outcome::InvariantPoint(p) if p.abs() <= 1e-9), || {
        format!("(d) outcome {:?}", r.outcome)
    })?;

    // (e)
    let cl = classify_point(&m, &s, &0.0).map_err(e)?;
    ensure(cl == Classification::Invariant, || format!("(e) classify(0) = {cl:?}"))?;
    Ok(format!("1001 sup checks, 100-term trace, invariant 0 after {} steps", r.trace.len() - 1))
}

fn axiom_suite() -> Result<String, String> {
    let e = |e: quasifix_core::error::Error| e.to_string();
    for (k, m) in BuiltinMetric::ALL.into_iter().enumerate() {
        let r = check_axioms_sampled(&ScalarSpace::new(m), 10_000, 1e-12, 100 + k as u64).map_err(e)?;
        ensure(r.overall == Status::Holds, || format!("{}: {:?}", m.name(), r.first_failure()))?;
    }
    for dim in 1..=3 {
        let r = check_axioms_sampled(&GaugeSpace::unit_cube(dim), 10_000, 1e-12, 7).map_err(e)?;
        ensure(r.overall == Status::Holds, || format!("unit cube {dim}: {:?}", r.first_failure()))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let circ = ScalarSpace::new(BuiltinMetric::CircularRailroad);
    let mut pairs = 0;
    while pairs < 1000 {
        let (a, b) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        if a == b {
            continue;
        }
        let sum = circ.distance(&a, &b).map_err(e)? + circ.distance(&b, &a).map_err(e)?;
        ensure((sum - TAU).abs() <= 1e-12, || format!("circular q({a},{b}) + q({b},{a}) = {sum}"))?;
        pairs += 1;
    }

    let cube = GaugeSpace::unit_cube(3);
    for _ in 0..1000 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let max_norm = x.iter().zip(&y).map(|(a, b)| (b - a).abs()).fold(0.0, f64::max);
        let g = cube.distance(&x, &y).map_err(e)?;
        ensure((g - max_norm).abs() <= 1e-12, || format!("gauge {g} vs max-norm {max_norm} at {x:?} -> {y:?}"))?;
    }
    Ok(format!("{} builtins x 10^4 triples, 10^3 circular pairs, 10^3 gauge pairs", BuiltinMetric::ALL.len()))
}

fn sweeps(props: &[Property], count: usize, min_hyp: usize) -> Result<String, String> {
    let mut parts = Vec::new();
    for &p in props {
        let r = property_sweep(p, count, SIZES, SWEEP_SEED).map_err(|e| e.to_string())?;
        ensure(r.generated == count, || format!("{}: generated {}", p.name(), r.generated))?;
        ensure(r.violations == 0, || {
            format!("{}: {} violations, first {:?}", p.name(), r.violations, r.dumps.first().map(|d| &d.case))
        })?;
        ensure(r.hypothesis_satisfied >= min_hyp, || {
            format!("{}: only {} hypothesis-satisfying", p.name(), r.hypothesis_satisfied)
        })?;
        parts.push(format!("{} {}/{}", p.name(), r.hypothesis_satisfied, r.generated));
    }
    Ok(parts.join(", "))
}

fn determinism() -> Result<String, String> {
    let e = |e: quasifix_core::error::Error| e.to_string();
    for p in Property::ALL {
        let a = serde_json::to_string(&property_sweep(p, 40, SIZES, 9).map_err(e)?).unwrap();
        let b = serde_json::to_string(&property_sweep(p, 40, SIZES, 9).map_err(e)?).unwrap();
        ensure(a == b, || format!("{} sweep differs between runs", p.name()))?;
    }
    for profile in [Profile::Nested, Profile::Arbitrary, Profile::Preorder] {
        let a = random_instance(6, 77, profile).map_err(e)?.to_json().to_string();
        let b = random_instance(6, 77, profile).map_err(e)?.to_json().to_string();
        ensure(a == b, || format!("{profile:?} instance differs"))?;
    }
    let s = ScalarSpace::new(BuiltinMetric::Remark46);
    let m = IntervalMap::zero_to_x(Interval::new(0.0, 1.0));
    let search = || {
        let r = find_invariant_point(&m, &s, &1.0, &SelectionRule::near_sup(), &SearchConfig::for_space(&s)).unwrap();
        (r.to_json(&s).to_string(), r.trace.to_jsonl(&s))
    };
    ensure(search() == search(), || "remark search artifacts differ".into())?;
    let id = IdentityMap::new(ScalarSpace::new(BuiltinMetric::Sorgenfrey));
    let sp = ScalarSpace::new(BuiltinMetric::Sorgenfrey);
    let idrun = || {
        find_invariant_point(&id, &sp, &0.3, &SelectionRule::near_sup(), &SearchConfig::for_space(&sp))
            .unwrap()
            .to_json(&sp)
            .to_string()
    };
    ensure(idrun() == idrun(), || "identity search artifacts differ".into())?;
    Ok("sweeps, instances and search artifacts are byte-identical".into())
}

#[test]
fn acceptance() {
    let lines = vec![
        run(1, "remark golden", Some(Duration::from_secs(1)), remark_golden),
        run(2, "axiom suite", Some(Duration::from_secs(1)), axiom_suite),
        run(3, "proposition sweeps", Some(Duration::from_secs(30)), || {
            sweeps(&[Property::Prop42, Property::Prop43, Property::Prop44, Property::Thm45], 200, 50)
        }),
        run(4, "reduction fidelity", Some(Duration::from_secs(10)), || {
            sweeps(&[Property::ReductionQiu, Property::ReductionKq], 100, 1)
        }),
        run(5, "common-point gate", Some(Duration::from_secs(30)), || sweeps(&[Property::Thm41], 500, 1)),
        run(6, "determinism", None, determinism),
    ];
    for l in &lines {
        let budget = l.limit.map(|d| format!(" / {d:?}")).unwrap_or_default();
        println!(
            "{} [{}] {}: {} ({:.1?}{budget})",
            if l.ok { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.detail,
            l.elapsed
        );
    }
    let failed: Vec<u8> = lines.iter().filter(|l| !l.ok).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
