//! `quasifix`: run nonvariant-point searches, condition checks and oracle
//! sweeps from a JSON config or command-line flags.

mod commands;
mod config;
mod expr;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use quasifix_core::oracle::Property;
use quasifix_core::qspace::RealDomain;

use commands::{CheckSpaceArgs, SweepArgs, SystemArg, VerifyArgs};
use config::{ExperimentConfig, MapSpec, Objective, RuleSpec, SpaceSpec};

#[derive(Parser)]
#[command(name = "quasifix", version, about = "Nonvariant points of set-valued maps on quasi-metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Space, map and rule selection; flags override the config file.
#[derive(Args, Clone, Debug, Default)]
struct ExpArgs {
    /// JSON experiment config; relative paths inside resolve against its directory
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin scalar space (sorgenfrey, one_sided_diff, half_line_log, circular_railroad, remark46, abs_diff)
    #[arg(long, conflicts_with_all = ["finite", "gauge"])]
    builtin: Option<String>,
    /// Finite space JSON: {"points": [...], "matrix": [[...]]}
    #[arg(long, conflicts_with = "gauge")]
    finite: Option<PathBuf>,
    /// Gauge space JSON: {"halfspaces": [{"a": [...], "b": ...}]}
    #[arg(long)]
    gauge: Option<PathBuf>,
    /// Builtin map: identity, interval_0_x, lower_set, upper_set
    #[arg(long, conflicts_with_all = ["map_file", "preorder"])]
    map: Option<String>,
    /// Extensional map JSON: {"images": {"a": ["a", "b"]}}
    #[arg(long, conflicts_with = "preorder")]
    map_file: Option<PathBuf>,
    /// Preorder JSON; the map becomes its level-set map
    #[arg(long)]
    preorder: Option<PathBuf>,
    /// Selection rule: near_sup or near_inf (near_inf needs --utility)
    #[arg(long)]
    rule: Option<String>,
    /// Utility for near_inf: an expression in x
    #[arg(long)]
    utility: Option<String>,
    /// Starting point as JSON (a number, a label or an array)
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for artifacts
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a nonvariant point; writes trace.jsonl, summary.json, report.json
    #[command(visible_alias = "run")]
    Iterate(ExpArgs),
    /// Check the quasi-metric axioms (exact on finite spaces, sampled otherwise)
    CheckSpace {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value_t = 10_000)]
        triples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Run a condition system against supplied traces
    Verify {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, value_enum, ignore_case = true)]
        system: SystemArg,
        /// Trace in JSON lines (each line has an "x" field); repeat for A and F
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        /// Limit candidate for E and B, as JSON
        #[arg(long)]
        xbar: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Run an oracle property sweep on random finite instances
    Sweep {
        #[arg(long)]
        property: Property,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write violating cases here as standalone JSON files
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// Dump every case, not only violations
        #[arg(long, requires = "dump_dir")]
        dump_all: bool,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a dumped sweep case and compare with the recorded verdict
    Replay { dump: PathBuf },
    /// Descent map of a scalar objective on a gridded interval, then search
    DemoEvp {
        #[arg(long, default_value = "abs_diff")]
        metric: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Objective in x, e.g. "abs(x - 0.3) + 0.5 * x"
        #[arg(long, allow_hyphen_values = true)]
        objective: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Starting point; snapped to the nearest grid point (default: hi)
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<f64>,
        /// near_inf (objective as utility) or near_sup
        #[arg(long, default_value = "near_inf")]
        rule: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_point(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

fn rule_spec(name: &str, utility: Option<String>) -> Result<RuleSpec> {
    Ok(match name {
        "near_sup" => RuleSpec::NearSup { scale: 1.0, ratio: 0.5 },
        "near_inf" => match utility {
            Some(u) => RuleSpec::NearInf {
                utility: Objective::Expr(u),
                scale: 1.0,
                ratio: 0.5,
            },
            None => bail!("rule: near_inf needs a utility"),
        },
        other => bail!("rule: unknown `{other}` (near_sup, near_inf)"),
    })
}

impl ExpArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(name) = self.builtin {
            c.space = Some(SpaceSpec::Builtin {
                name,
                domain: None,
                halfspaces: None,
            });
        }
        if let Some(path) = self.finite {
            c.space = Some(SpaceSpec::Finite { path });
        }
        if let Some(path) = self.gauge {
            c.space = Some(SpaceSpec::Gauge { path });
        }
        if let Some(m) = self.map {
            c.map = Some(match m.as_str() {
                "identity" => MapSpec::Identity,
                "interval_0_x" => MapSpec::IntervalZeroToX,
                "lower_set" => MapSpec::LowerSet,
                "upper_set" => MapSpec::UpperSet,
                other => bail!("map: unknown builtin `{other}` (identity, interval_0_x, lower_set, upper_set)"),
            });
        }
        if let Some(path) = self.map_file {
            c.map = Some(MapSpec::Extensional { path });
        }
        if let Some(path) = self.preorder {
            c.map = Some(MapSpec::LevelSet { path });
        }
        match (self.rule, self.utility) {
            (Some(r), u) => c.rule = Some(rule_spec(&r, u)?),
            (None, Some(u)) => c.rule = Some(rule_spec("near_inf", Some(u))?),
            (None, None) => {}
        }
        if let Some(x) = self.x0 {
            c.x0 = Some(parse_point(&x));
        }
        c.budget = self.budget.or(c.budget);
        c.gap_tol = self.gap_tol.or(c.gap_tol);
        c.epsilon = self.epsilon.or(c.epsilon);
        c.seed = self.seed.or(c.seed);
        c.output = self.out.or(c.output);
        Ok(c)
    }
}

fn execute(cli: Cli) -> Result<(Value, u8)> {
    match cli.command {
        Command::Iterate(exp) => commands::run(&exp.resolve()?),
        Command::CheckSpace { exp, triples, tol } => commands::check_space(&exp.resolve()?, &CheckSpaceArgs { triples, tol }),
        Command::Verify {
            exp,
            system,
            traces,
            xbar,
            tol,
            window,
        } => {
            let v = VerifyArgs {
                system,
                traces,
                xbar: xbar.as_deref().map(parse_point),
                tol,
                window,
            };
            commands::verify(&exp.resolve()?, &v)
        }
        Command::Sweep {
            property,
            count,
            min_size,
            max_size,
            seed,
            dump_dir,
            dump_all,
            out,
        } => {
            let (report, code) = commands::sweep(&SweepArgs {
                property,
                count,
                sizes: (min_size, max_size),
                seed,
                dump_dir,
                dump_all,
            })?;
            if let Some(p) = out {
                std::fs::write(&p, commands::pretty(&report))?;
            }
            Ok((report, code))
        }
        Command::Replay { dump } => commands::replay_dump(&dump),
        Command::DemoEvp {
            metric,
            lo,
            hi,
            points,
            objective,
            lambda,
            x0,
            rule,
            budget,
            out,
        } => {
            let rule = match rule.as_str() {
                "near_inf" => rule_spec("near_inf", Some(objective.clone()))?,
                other => rule_spec(other, None)?,
            };
            let cfg = ExperimentConfig {
                space: Some(SpaceSpec::Builtin {
                    name: metric,
                    domain: Some(RealDomain::closed(lo, hi)),
                    halfspaces: None,
                }),
                map: Some(MapSpec::Descent {
                    objective: Objective::Expr(objective),
                    lambda,
                    points: Some(points),
                    tolerance: 1e-12,
                }),
                rule: Some(rule),
                x0: Some(Value::from(x0.unwrap_or(hi))),
                budget,
                output: out,
                ..Default::default()
            };
            commands::demo_evp(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((v, code)) => {
            // a closed pipe is not an error worth a panic
            let _ = writeln!(std::io::stdout(), "{}", commands::pretty(&v));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
