//! `skeletron`: command-line front end.
//!
//! JSON arguments are given inline or as a path to a file. Results go to
//! stdout as JSON, diagnostics to stderr. Exit status is 0 on success, 1 when
//! a verification fails and 2 for bad input.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use skeletron::berkovich::{build_skeleton_tree, P1Point, RationalFunction};
use skeletron::generate::rng_from_seed;
use skeletron::metric_graph::MetricGraph;
use skeletron::oracle::newton_quotient;
use skeletron::rational::{format_rational, parse_rational};
use skeletron::selftest::{self, DEFAULT_SEED};
use skeletron::slope::{plot_table, verify_with_orders};
use skeletron::stable::{stabilize, tate_skeleton};
use skeletron::tropical::{map_skeleton, slope_change_count, Breakpoint, Interval, TropicalLaurent};
use skeletron::valued_field::{PuiseuxElement, ValQ};

#[derive(Parser)]
#[command(name = "skeletron", version, about = "Exact skeleta of punctured curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Breakpoints and unit data of a tropical Laurent polynomial, or of a
    /// rational function expanded about a center.
    Newton {
        #[arg(long)]
        f: String,
        /// `lo,hi`; either end may be -inf / +inf.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        /// Expansion center for a rational function.
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
    },
    /// val f at a type-2 point.
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long)]
        point: String,
    },
    /// Skeleton tree of P^1 minus a set of punctures.
    Skeleton {
        #[arg(long)]
        punctures: String,
        /// Extra type-2 vertices.
        #[arg(long)]
        extra: Option<String>,
    },
    /// Certify the slope properties of val f on the skeleton.
    SlopeCheck {
        #[arg(long)]
        f: String,
        #[arg(long)]
        punctures: String,
        #[arg(long)]
        extra: Option<String>,
        /// Off-skeleton retraction samples.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Expected orders by ray marking, overriding those of f.
        #[arg(long)]
        orders: Option<String>,
        /// Write a tab-separated table of edges and slopes here.
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Prune a marked weighted metric graph to its stable model.
    Stabilize {
        #[arg(long)]
        graph: String,
    },
    /// Minimal skeleton of an elliptic curve from val(j).
    Tate {
        #[arg(long, allow_hyphen_values = true)]
        val_j: String,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run only this criterion.
        #[arg(long)]
        criterion: Option<u32>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Inline JSON, or a path to a file holding it.
fn load<T: DeserializeOwned>(what: &str, arg: &str) -> Result<T, CliError> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with(['{', '[', '"']) {
        (arg.to_string(), "inline".to_string())
    } else {
        let text = fs::read_to_string(Path::new(arg)).map_err(|e| CliError::Input(format!("{what}: cannot read {arg}: {e}")))?;
        (text, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "{what} ({origin}): malformed JSON at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(input)?;
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Input(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NewtonInput {
    Laurent {
        terms: Value,
        interval: Option<Interval>,
    },
    Function(RationalFunction),
}

fn breakpoint_json(bp: &Breakpoint, predicted: Option<i64>) -> Value {
    let mut v = json!({
        "s": format_rational(&bp.s),
        "slope_left": bp.slope_left,
        "slope_right": bp.slope_right,
        "slope_change": bp.slope_change(),
    });
    if let Some(p) = predicted {
        v["predicted_change"] = json!(p);
    }
    v
}

fn newton(f: &str, interval: Option<&str>, center: Option<&str>) -> Result<(), CliError> {
    let given = interval.map(Interval::parse_pair).transpose().map_err(input)?;
    match load::<NewtonInput>("--f", f)? {
        NewtonInput::Laurent { terms, interval: inline } => {
            let laurent: TropicalLaurent = serde_json::from_value(json!({ "terms": terms })).map_err(input)?;
            let interval = given.or(inline).unwrap_or_else(Interval::whole_line);
            let breakpoints: Vec<Value> = laurent.breakpoints(&interval).iter().map(|b| breakpoint_json(b, None)).collect();
            let unit = match laurent.unit_decomposition(&interval) {
                Some((d, val_alpha)) => {
                    let image = if d == 0 {
                        Value::Null
                    } else {
                        serde_json::to_value(map_skeleton(d, &val_alpha, &interval).map_err(input)?).map_err(input)?
                    };
                    json!({ "d": d, "val_alpha": format_rational(&val_alpha), "image": image })
                }
                None => Value::Null,
            };
            emit(&json!({
                "interval": interval,
                "breakpoints": breakpoints,
                "unit": unit,
            }))
        }
        NewtonInput::Function(func) => {
            let center: PuiseuxElement = match center {
                Some(c) => c.parse().map_err(input)?,
                None => PuiseuxElement::zero(),
            };
            let interval = given.unwrap_or_else(Interval::whole_line);
            let data: Vec<(skeletron::rational::Rat, i64)> = func
                .finite_factors()
                .filter_map(|(a, m)| match (a - &center).valuation() {
                    ValQ::Finite(v) => Some((v, m)),
                    ValQ::Infinity => None,
                })
                .collect();
            let q = newton_quotient(&func, &center);
            let breakpoints: Vec<Value> = q
                .breakpoints(&interval)
                .iter()
                .map(|b| breakpoint_json(b, Some(slope_change_count(&data, &b.s))))
                .collect();
            emit(&json!({
                "center": center,
                "interval": interval,
                "numerator": q.num,
                "denominator": q.den,
                "breakpoints": breakpoints,
                "order_at_center": func.order_at(&P1Point::Finite(center.clone())),
            }))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Newton { f, interval, center } => newton(&f, interval.as_deref(), center.as_deref()),
        Command::Eval { f, point } => {
            let func: RationalFunction = load("--f", &f)?;
            let point: P1Point = load("--point", &point)?;
            let value = func.eval_val(&point).map_err(input)?;
            emit(&json!({ "point": point, "value": format_rational(&value) }))
        }
        Command::Skeleton { punctures, extra } => {
            let punctures: Vec<P1Point> = load("--punctures", &punctures)?;
            let extra: Vec<P1Point> = extra.map(|e| load("--extra", &e)).transpose()?.unwrap_or_default();
            let tree = build_skeleton_tree(&punctures, &extra).map_err(input)?;
            emit(&tree)
        }
        Command::SlopeCheck {
            f,
            punctures,
            extra,
            samples,
            seed,
            orders,
            emit_plot,
        } => {
            let func: RationalFunction = load("--f", &f)?;
            let punctures: Vec<P1Point> = load("--punctures", &punctures)?;
            let extra: Vec<P1Point> = extra.map(|e| load("--extra", &e)).transpose()?.unwrap_or_default();
            let tree = build_skeleton_tree(&punctures, &extra).map_err(input)?;
            let mut expected: BTreeMap<String, i64> = tree
                .ray_targets()
                .iter()
                .map(|(m, p)| (m.clone(), func.order_at(p)))
                .collect();
            if let Some(o) = orders {
                let given: BTreeMap<String, i64> = load("--orders", &o)?;
                for (mark, order) in given {
                    if !expected.contains_key(&mark) {
                        return Err(CliError::Input(format!("--orders: no ray marked `{mark}`")));
                    }
                    expected.insert(mark, order);
                }
            }
            let report = verify_with_orders(&func, &tree, &expected, samples, &mut rng_from_seed(seed)).map_err(input)?;
            if let Some(path) = emit_plot {
                fs::write(&path, plot_table(&tree, &report.function))
                    .map_err(|e| CliError::Input(format!("--emit-plot {}: {e}", path.display())))?;
            }
            emit(&report)?;
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Verification(format!("slope check failed: {}", report.failures().join("; "))))
            }
        }
        Command::Stabilize { graph } => {
            let graph: MetricGraph = load("--graph", &graph)?;
            let report = stabilize(&graph).map_err(input)?;
            emit(&report)
        }
        Command::Tate { val_j } => {
            let v = parse_rational(&val_j).map_err(input)?;
            let s = tate_skeleton(&v);
            eprintln!("{:?} reduction", s.reduction);
            emit(&s.graph)
        }
        Command::Selftest { seed, criterion } => {
            let fixtures = std::env::var_os("SKELETRON_FIXTURES").map(PathBuf::from);
            let outcomes = match criterion {
                Some(id) => vec![selftest::run_criterion(id, seed)
                    .ok_or_else(|| CliError::Input(format!("no criterion {id}; valid ids are 1 to 9")))?],
                None => selftest::run_all(seed, fixtures.as_deref()),
            };
            for o in &outcomes {
                eprintln!("{}", o.line());
            }
            emit(&outcomes)?;
            let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(format!("failed criteria: {failed:?}")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
