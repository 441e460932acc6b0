use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use quasifix_core::diagnostics::{
    check_a_conditions, check_b_conditions, check_c_conditions, check_e_conditions, check_f_conditions, CheckOptions, ConditionReport, Status,
};
use quasifix_core::oracle::{property_sweep, replay, run_case, sweep_cases, Property, ViolationDump};
use quasifix_core::picard::{find_invariant_point, points_from_jsonl, Outcome, SearchConfig, SelectionRule};
use quasifix_core::qspace::{check_axioms, check_axioms_sampled, QuasiMetric};
use quasifix_core::setmap::{SetValuedMap, TauFunction};

use crate::config::{load, ExperimentConfig, Loaded, SpaceSpec};

macro_rules! dispatch {
    ($loaded:expr, |$space:ident, $map:ident, $rule:ident, $x0:ident| $body:expr) => {
        match $loaded {
            Loaded::Scalar { space: $space, map: $map, rule: $rule, x0: $x0 } => $body,
            Loaded::Finite { space: $space, map: $map, rule: $rule, x0: $x0, .. } => $body,
            Loaded::Gauge { space: $space, map: $map, rule: $rule, x0: $x0 } => $body,
        }
    };
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Holds => 0,
        Status::Fails => 1,
        Status::Undetermined => 2,
    }
}

fn report_value(r: &ConditionReport) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

/// Runs the search and writes `trace.jsonl`, `summary.json` and
/// `report.json` under `out` when given. Returns the summary and exit code.
fn search<S, M>(space: &S, map: &M, rule: &SelectionRule<S::Point>, x0: &S::Point, cfg: &SearchConfig, out: Option<&Path>) -> Result<(Value, u8)>
where
    S: QuasiMetric,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let r = find_invariant_point(map, space, x0, rule, cfg)?;
    let summary = r.to_json(space);
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write(&dir.join("trace.jsonl"), &r.trace.to_jsonl(space))?;
        write(&dir.join("summary.json"), &pretty(&summary))?;
        write(&dir.join("report.json"), &pretty(&report_value(&r.report)))?;
    }
    let code = match r.outcome {
        Outcome::InvariantPoint(_) | Outcome::NonvariantPoint(_) => 0,
        Outcome::BudgetExhausted { .. } | Outcome::ConditionViolation { .. } => 2,
    };
    Ok((summary, code))
}

pub fn run(cfg: &ExperimentConfig) -> Result<(Value, u8)> {
    let loaded = load(cfg)?;
    let out = cfg.output.as_deref();
    dispatch!(loaded, |space, map, rule, x0| {
        let x0 = x0.ok_or_else(|| anyhow!("x0: missing"))?;
        search(&space, &map, &rule, &x0, &cfg.search_config(&space), out)
    })
}

/// `demo-evp`: the descent map of an objective on a gridded interval.
pub fn demo_evp(cfg: &ExperimentConfig) -> Result<(Value, u8)> {
    let (mut summary, code) = run(cfg)?;
    if let (Some(SpaceSpec::Builtin { .. }), Some(crate::config::MapSpec::Descent { objective, lambda, .. })) = (&cfg.space, &cfg.map) {
        if let (crate::config::Objective::Expr(src), Some(p)) = (objective, summary["outcome"]["point"].as_str()) {
            let t: f64 = p.parse().context("grid label")?;
            let f = crate::expr::Expr::parse(src)?.eval(t);
            summary["evp"] = json!({ "objective": src, "lambda": lambda, "x": t, "f": f });
        }
    }
    Ok((summary, code))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SystemArg {
    A,
    B,
    C,
    E,
    F,
}

pub struct VerifyArgs {
    pub system: SystemArg,
    pub traces: Vec<PathBuf>,
    pub xbar: Option<Value>,
    pub tol: Option<f64>,
    pub window: Option<usize>,
}

fn read_traces<S: QuasiMetric>(space: &S, paths: &[PathBuf]) -> Result<Vec<Vec<S::Point>>> {
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading trace {}", p.display()))?;
            let pts = points_from_jsonl(&text, space).with_context(|| format!("trace {}", p.display()))?;
            if pts.is_empty() {
                bail!("trace {} is empty", p.display());
            }
            Ok(pts)
        })
        .collect()
}

fn options<S: QuasiMetric>(space: &S, v: &VerifyArgs) -> CheckOptions {
    let mut o = CheckOptions::for_space(space);
    if let Some(t) = v.tol {
        o = o.with_tol(t);
    }
    if let Some(w) = v.window {
        o = o.with_window(w);
    }
    o
}

fn verify_generic<S, M>(space: &S, map: &M, v: &VerifyArgs) -> Result<ConditionReport>
where
    S: QuasiMetric + Clone + 'static,
    M: SetValuedMap<Point = S::Point> + ?Sized,
{
    let traces = read_traces(space, &v.traces)?;
    let opts = options(space, v);
    let xbar = v.xbar.as_ref().map(|x| space.point_from_json(x)).transpose().context("xbar")?;
    let first = traces.first().ok_or_else(|| anyhow!("trace: at least one --trace is required"))?;
    Ok(match v.system {
        SystemArg::E => check_e_conditions(first, map, space, xbar.as_ref(), &[], &opts)?,
        SystemArg::F => check_f_conditions(map, space, &traces, &[], &opts)?,
        SystemArg::A => check_a_conditions(map, space, &traces, &[], None, &opts)?,
        SystemArg::B => {
            let base = space.clone();
            let tau = TauFunction::new(space.clone(), move |x, y| base.distance(x, y).unwrap_or(f64::INFINITY), false);
            let xbar = xbar.unwrap_or_else(|| first.last().expect("nonempty").clone());
            check_b_conditions(first, map, &tau, &xbar, &opts)?
        }
        SystemArg::C => bail!("system C needs a finite space with a level_set map and a near_inf utility"),
    })
}

pub fn verify(cfg: &ExperimentConfig, v: &VerifyArgs) -> Result<(Value, u8)> {
    let loaded = load(cfg)?;
    let report = match (&v.system, loaded) {
        (SystemArg::C, Loaded::Finite { space, preorder, utility, .. }) => {
            let order = preorder.ok_or_else(|| anyhow!("system C: map must be a level_set map"))?;
            let phi = utility.ok_or_else(|| anyhow!("system C: rule must be near_inf with a utility"))?;
            let traces = read_traces(&space, &v.traces)?;
            let trace = traces.first().ok_or_else(|| anyhow!("trace: at least one --trace is required"))?;
            let universe: Vec<usize> = (0..space.len()).collect();
            check_c_conditions(&order, &phi, &trace[0], trace, Some(&universe), &[], &options(&space, v))?
        }
        (_, loaded) => dispatch!(loaded, |space, map, _rule, _x0| verify_generic(&space, &map, v)?),
    };
    Ok((report_value(&report), status_code(report.overall)))
}

pub struct CheckSpaceArgs {
    pub triples: usize,
    pub tol: f64,
}

pub fn check_space(cfg: &ExperimentConfig, a: &CheckSpaceArgs) -> Result<(Value, u8)> {
    let seed = cfg.seed.unwrap_or(0);
    let report = match cfg.space.clone().ok_or_else(|| anyhow!("space: missing"))? {
        SpaceSpec::Finite { path } => {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let s = quasifix_core::qspace::FiniteQuasiMetricSpace::from_json(&text).with_context(|| format!("space: {}", path.display()))?;
            check_axioms(&s)
        }
        _ => {
            // the map is irrelevant here
            let bare = ExperimentConfig {
                map: None,
                rule: None,
                x0: None,
                ..cfg.clone()
            };
            match load(&bare)? {
                Loaded::Scalar { space, .. } => check_axioms_sampled(&space, a.triples, a.tol, seed)?,
                Loaded::Gauge { space, .. } => check_axioms_sampled(&space, a.triples, a.tol, seed)?,
                Loaded::Finite { space, .. } => check_axioms(&space),
            }
        }
    };
    Ok((report_value(&report), status_code(report.overall)))
}

pub struct SweepArgs {
    pub property: Property,
    pub count: usize,
    pub sizes: (usize, usize),
    pub seed: u64,
    pub dump_dir: Option<PathBuf>,
    pub dump_all: bool,
}

fn dump_path(dir: &Path, d: &ViolationDump) -> PathBuf {
    dir.join(format!("{}_{:04}.json", d.case.property.name(), d.case.index))
}

pub fn sweep(a: &SweepArgs) -> Result<(Value, u8)> {
    let report = property_sweep(a.property, a.count, a.sizes, a.seed)?;
    if let Some(dir) = &a.dump_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let dumps = if a.dump_all {
            sweep_cases(a.property, a.count, a.sizes, a.seed)?
                .into_iter()
                .map(|case| {
                    let (inst, outcome) = run_case(&case)?;
                    Ok(ViolationDump {
                        case,
                        instance: inst.to_json(),
                        outcome,
                    })
                })
                .collect::<quasifix_core::error::Result<Vec<_>>>()?
        } else {
            report.dumps.clone()
        };
        for d in &dumps {
            write(&dump_path(dir, d), &pretty(&serde_json::to_value(d)?))?;
        }
    }
    let code = if report.violations == 0 { 0 } else { 1 };
    Ok((serde_json::to_value(&report)?, code))
}

pub fn replay_dump(path: &Path) -> Result<(Value, u8)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dump: ViolationDump = serde_json::from_str(&text).with_context(|| format!("parsing dump {}", path.display()))?;
    let (same, outcome) = replay(&dump)?;
    let v = json!({
        "reproduced": same,
        "case": dump.case,
        "recorded": dump.outcome,
        "replayed": outcome,
    });
    Ok((v, if same { 0 } else { 1 }))
}
