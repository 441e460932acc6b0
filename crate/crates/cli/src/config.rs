use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use quasifix_core::picard::{SearchConfig, SelectionRule, SlackSchedule};
use quasifix_core::qspace::{tabulate, BuiltinMetric, FiniteQuasiMetricSpace, GaugeSpace, QuasiMetric, RealDomain, ScalarSpace};
use quasifix_core::setmap::{preorder_for_space, DescentMap, ExtReal, ExtensionalMap, FinitePreorder, IdentityMap, IntervalMap, SetValuedMap, Utility};

use crate::expr::Expr;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: Option<SpaceSpec>,
    pub map: Option<MapSpec>,
    pub rule: Option<RuleSpec>,
    pub x0: Option<Value>,
    pub budget: Option<usize>,
    pub gap_tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<RealDomain>,
        /// Only for `minkowski_gauge`: `[{"a": [...], "b": r}, ...]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        halfspaces: Option<Value>,
    },
    Finite {
        path: PathBuf,
    },
    Gauge {
        path: PathBuf,
    },
}

/// A scalar expression in `x`, or a table of values keyed by point label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Objective {
    Expr(String),
    Table(BTreeMap<String, f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    #[serde(rename = "interval_0_x")]
    IntervalZeroToX,
    LowerSet,
    UpperSet,
    Extensional {
        path: PathBuf,
    },
    LevelSet {
        path: PathBuf,
    },
    /// `Φ(x) = {u : f(u) + λ q(x, u) <= f(x)}`. On builtin spaces the
    /// universe is replaced by `points` evenly spaced grid points.
    Descent {
        objective: Objective,
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default)]
        points: Option<usize>,
        #[serde(default = "descent_tol")]
        tolerance: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn descent_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    NearSup {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "half")]
        ratio: f64,
    },
    NearInf {
        utility: Objective,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "half")]
        ratio: f64,
    },
}

fn half() -> f64 {
    0.5
}

impl ExperimentConfig {
    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.space {
            Some(SpaceSpec::Finite { path }) | Some(SpaceSpec::Gauge { path }) => fix(path),
            _ => {}
        }
        match &mut self.map {
            Some(MapSpec::Extensional { path }) | Some(MapSpec::LevelSet { path }) => fix(path),
            _ => {}
        }
        if let Some(o) = &mut self.output {
            fix(o);
        }
    }

    pub fn search_config<S: QuasiMetric + ?Sized>(&self, space: &S) -> SearchConfig {
        let mut c = SearchConfig::for_space(space);
        if let Some(b) = self.budget {
            c.budget = b;
        }
        if let Some(g) = self.gap_tol {
            c.gap_tol = g;
        }
        if let Some(e) = self.epsilon {
            c.epsilon = e;
        }
        c
    }
}

/// A space with its map, rule and starting point resolved.
pub enum Loaded {
    Scalar {
        space: ScalarSpace,
        map: Box<dyn SetValuedMap<Point = f64>>,
        rule: SelectionRule<f64>,
        x0: Option<f64>,
    },
    Finite {
        space: FiniteQuasiMetricSpace,
        map: Box<dyn SetValuedMap<Point = usize>>,
        rule: SelectionRule<usize>,
        x0: Option<usize>,
        preorder: Option<FinitePreorder>,
        utility: Option<Utility<usize>>,
    },
    Gauge {
        space: GaugeSpace,
        map: Box<dyn SetValuedMap<Point = Vec<f64>>>,
        rule: SelectionRule<Vec<f64>>,
        x0: Option<Vec<f64>>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn slack(scale: f64, ratio: f64) -> Result<SlackSchedule> {
    SlackSchedule::new(scale, ratio).context("rule")
}

fn builtin_space(name: &str, domain: Option<RealDomain>) -> Result<ScalarSpace> {
    let m = BuiltinMetric::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = BuiltinMetric::ALL.iter().map(|m| m.name()).collect();
        anyhow!("space.name: unknown builtin `{name}` (known: {})", known.join(", "))
    })?;
    match domain {
        Some(d) => ScalarSpace::with_domain(m, d).context("space.domain"),
        None => Ok(ScalarSpace::new(m)),
    }
}

fn table_values(t: &BTreeMap<String, f64>, space: &FiniteQuasiMetricSpace, what: &str) -> Result<Vec<f64>> {
    for k in t.keys() {
        if space.index_of(k).is_none() {
            bail!("{what}: unknown point label `{k}`");
        }
    }
    space
        .labels()
        .iter()
        .map(|l| t.get(l).copied().ok_or_else(|| anyhow!("{what}: no value for point `{l}`")))
        .collect()
}

/// Values of an objective at the points of a finite space. Expressions are
/// evaluated at the numeric value of each label.
fn finite_values(obj: &Objective, space: &FiniteQuasiMetricSpace, what: &str) -> Result<Vec<f64>> {
    match obj {
        Objective::Table(t) => table_values(t, space, what),
        Objective::Expr(src) => {
            let e = Expr::parse(src).with_context(|| what.to_string())?;
            space
                .labels()
                .iter()
                .map(|l| {
                    l.parse::<f64>()
                        .map(|t| e.eval(t))
                        .map_err(|_| anyhow!("{what}: expressions need numeric point labels, got `{l}`"))
                })
                .collect()
        }
    }
}

fn scalar_expr(obj: &Objective, what: &str) -> Result<Expr> {
    match obj {
        Objective::Expr(src) => Expr::parse(src).with_context(|| what.to_string()),
        Objective::Table(_) => bail!("{what}: scalar spaces need an expression, not a table"),
    }
}

/// Index of the grid point nearest to `t`.
fn snap(labels: &[String], t: f64) -> Option<usize> {
    labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.parse::<f64>().ok().map(|v| (i, (v - t).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

pub fn load(cfg: &ExperimentConfig) -> Result<Loaded> {
    let space = cfg.space.clone().ok_or_else(|| anyhow!("space: missing"))?;
    let map = cfg.map.clone().unwrap_or(MapSpec::Identity);
    let rule = cfg.rule.clone().unwrap_or(RuleSpec::NearSup { scale: 1.0, ratio: 0.5 });

    let space = match space {
        SpaceSpec::Builtin { name, halfspaces, .. } if name == "minkowski_gauge" => {
            let hs = halfspaces.ok_or_else(|| anyhow!("space.halfspaces: required for minkowski_gauge"))?;
            let g = GaugeSpace::from_json(&serde_json::json!({ "halfspaces": hs }).to_string()).context("space.halfspaces")?;
            return gauge_loaded(g, map, rule, cfg);
        }
        other => other,
    };
    match space {
        SpaceSpec::Builtin { name, domain, .. } => {
            let s = builtin_space(&name, domain)?;
            if let MapSpec::Descent { objective, lambda, points, tolerance } = &map {
                // tabulate on a grid so images are exact
                let ext = s.domain().extent();
                if !ext.is_bounded() {
                    bail!("map: descent on `{name}` needs a bounded space.domain");
                }
                let k = points.unwrap_or(101);
                if k < 2 {
                    bail!("map.points: need at least 2, got {k}");
                }
                let grid: Vec<f64> = ext.grid(k).into_iter().filter(|t| s.contains(t)).collect();
                let fs = tabulate(&s, &grid)?;
                let e = scalar_expr(objective, "map.objective")?;
                let values: Vec<f64> = grid.iter().map(|&t| e.eval(t)).collect();
                let m = descent(values, *lambda, *tolerance, &fs)?;
                return finite_loaded(fs, m, None, &rule, cfg.x0.as_ref(), true);
            }
            let universe = s.domain().extent();
            let m: Box<dyn SetValuedMap<Point = f64>> = match map {
                MapSpec::Identity => Box::new(IdentityMap::new(s.clone())),
                MapSpec::IntervalZeroToX => Box::new(IntervalMap::zero_to_x(universe)),
                MapSpec::LowerSet => Box::new(IntervalMap::lower_set(universe)),
                MapSpec::UpperSet => Box::new(IntervalMap::upper_set(universe)),
                other => bail!("map: `{}` needs a finite space", map_name(&other)),
            };
            let r = match rule {
                RuleSpec::NearSup { scale, ratio } => SelectionRule::near_sup().with_slack(slack(scale, ratio)?),
                RuleSpec::NearInf { utility, scale, ratio } => {
                    let e = scalar_expr(&utility, "rule.utility")?;
                    SelectionRule::near_inf(Utility::real(move |x: &f64| e.eval(*x))).with_slack(slack(scale, ratio)?)
                }
            };
            let x0 = cfg.x0.as_ref().map(|v| s.point_from_json(v)).transpose().context("x0")?;
            Ok(Loaded::Scalar { space: s, map: m, rule: r, x0 })
        }
        SpaceSpec::Finite { path } => {
            let s = FiniteQuasiMetricSpace::from_json(&read(&path)?).with_context(|| format!("space: {}", path.display()))?;
            let (m, preorder): (Box<dyn SetValuedMap<Point = usize>>, _) = match &map {
                MapSpec::Identity => (Box::new(ExtensionalMap::identity(s.len())), None),
                MapSpec::Extensional { path } => (
                    Box::new(ExtensionalMap::from_json(&read(path)?, &s).with_context(|| format!("map: {}", path.display()))?),
                    None,
                ),
                MapSpec::LevelSet { path } => {
                    let p = preorder_for_space(&read(path)?, &s).with_context(|| format!("map: {}", path.display()))?;
                    (Box::new(p.level_set_map()), Some(p))
                }
                MapSpec::Descent { objective, lambda, tolerance, .. } => {
                    let values = finite_values(objective, &s, "map.objective")?;
                    (descent(values, *lambda, *tolerance, &s)?, None)
                }
                other => bail!("map: `{}` needs a scalar space", map_name(other)),
            };
            finite_loaded(s, m, preorder, &rule, cfg.x0.as_ref(), false)
        }
        SpaceSpec::Gauge { path } => {
            let s = GaugeSpace::from_json(&read(&path)?).with_context(|| format!("space: {}", path.display()))?;
            gauge_loaded(s, map, rule, cfg)
        }
    }
}

fn gauge_loaded(s: GaugeSpace, map: MapSpec, rule: RuleSpec, cfg: &ExperimentConfig) -> Result<Loaded> {
    let m: Box<dyn SetValuedMap<Point = Vec<f64>>> = match map {
        MapSpec::Identity => Box::new(IdentityMap::new(s.clone())),
        other => bail!("map: `{}` is not available on gauge spaces", map_name(&other)),
    };
    let r = match rule {
        RuleSpec::NearSup { scale, ratio } => SelectionRule::near_sup().with_slack(slack(scale, ratio)?),
        RuleSpec::NearInf { .. } => bail!("rule: near_inf is not available on gauge spaces"),
    };
    let x0 = cfg.x0.as_ref().map(|v| s.point_from_json(v)).transpose().context("x0")?;
    Ok(Loaded::Gauge { space: s, map: m, rule: r, x0 })
}

fn descent(values: Vec<f64>, lambda: f64, tol: f64, space: &FiniteQuasiMetricSpace) -> Result<Box<dyn SetValuedMap<Point = usize>>> {
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        bail!("map.objective: value {v} at point `{}` is not finite", space.label(i));
    }
    let m = DescentMap::new(space.clone(), move |i: &usize| values[*i], lambda)
        .context("map.lambda")?
        .with_tolerance(tol);
    Ok(Box::new(m))
}

fn map_name(m: &MapSpec) -> &'static str {
    match m {
        MapSpec::Identity => "identity",
        MapSpec::IntervalZeroToX => "interval_0_x",
        MapSpec::LowerSet => "lower_set",
        MapSpec::UpperSet => "upper_set",
        MapSpec::Extensional { .. } => "extensional",
        MapSpec::LevelSet { .. } => "level_set",
        MapSpec::Descent { .. } => "descent",
    }
}

fn finite_loaded(
    s: FiniteQuasiMetricSpace,
    map: Box<dyn SetValuedMap<Point = usize>>,
    preorder: Option<FinitePreorder>,
    rule: &RuleSpec,
    x0: Option<&Value>,
    snap_x0: bool,
) -> Result<Loaded> {
    let (r, utility) = match rule {
        RuleSpec::NearSup { scale, ratio } => (SelectionRule::near_sup().with_slack(slack(*scale, *ratio)?), None),
        RuleSpec::NearInf { utility, scale, ratio } => {
            let values = finite_values(utility, &s, "rule.utility")?;
            let u = Utility::from_values(values.into_iter().map(ExtReal::from).collect());
            (SelectionRule::near_inf(u.clone()).with_slack(slack(*scale, *ratio)?), Some(u))
        }
    };
    let x0 = match x0 {
        None => None,
        Some(Value::Number(n)) if snap_x0 => {
            let t = n.as_f64().ok_or_else(|| anyhow!("x0: not a number"))?;
            Some(snap(s.labels(), t).ok_or_else(|| anyhow!("x0: grid has no numeric points"))?)
        }
        Some(v) => Some(s.point_from_json(v).context("x0")?),
    };
    Ok(Loaded::Finite {
        space: s,
        map,
        rule: r,
        x0,
        preorder,
        utility,
    })
}
