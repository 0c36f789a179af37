//! Command-line front end. [`run`] takes the arguments and output streams so
//! the binary and the tests share one code path.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use causal_id::oracle::{plan_deviation, random_scm, verify_query, Deviation, SearchBounds};
use causal_id::{
    c_components, d_separated, identify_plan, idc_query, parse_graph, unsoundness_report, Admg, Failure, GraphError,
    IdentResult, OracleError, Plan, PlanError, ProbExpr, Query, QueryError, RenderFormat, Stage, VarSet,
};

/// Exit status for an identifiable result or a successful command.
pub const EXIT_OK: i32 = 0;
/// Usage, parse or validation error.
pub const EXIT_ERROR: i32 = 1;
/// The query or plan is not identifiable.
pub const EXIT_NOT_IDENTIFIABLE: i32 = 2;
/// An oracle check exceeded its tolerance, or a comparison found a bug.
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: GraphError },
    #[error("{path}: {message}")]
    GraphJson { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    PlanFile { path: PathBuf, message: String },
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    GraphUse(#[from] GraphError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Latex,
    Json,
}

impl From<Format> for RenderFormat {
    fn from(f: Format) -> RenderFormat {
        match f {
            Format::Text => RenderFormat::Text,
            Format::Latex => RenderFormat::Latex,
            Format::Json => RenderFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "causal-id", version, about = "Identify causal effects in acyclic directed mixed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Identify a query; exit 2 if it is not identifiable.
    Identify {
        graph: PathBuf,
        query: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Test d-separation of two comma-separated node sets.
    Dsep {
        graph: PathBuf,
        x: String,
        y: String,
        #[arg(long, default_value = "")]
        given: String,
    },
    /// Print the C-components of a graph.
    Components {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Identify a query and compare the estimand with random binary models.
    Verify {
        graph: PathBuf,
        query: String,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Run both conditional identification procedures and the witness search.
    Compare {
        graph: PathBuf,
        query: String,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Identify the outcome distribution under a plan and check it against
    /// policy simulation.
    Plan {
        graph: PathBuf,
        plan: PathBuf,
        /// Outcome variables, required when the file holds a bare stage list.
        #[arg(long)]
        outcome: Option<String>,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let _ = writeln!(err, "{first}");
            return EXIT_ERROR;
        }
    };
    let mut buf = Vec::new();
    let code = match dispatch(cli.command, &mut buf) {
        Ok(code) => code,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            return EXIT_ERROR;
        }
    };
    let _ = out.write_all(&buf);
    code
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Graph files hold the line format, or the JSON object form when the first
/// non-blank character is `{`.
fn load_graph(path: &Path) -> Result<Admg, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(&text).map_err(|e| CliError::GraphJson {
            path: path.to_path_buf(),
            message: e.to_string(),
        });
    }
    parse_graph(&text).map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

fn names(list: &str) -> VarSet {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn hedge_text(f: &Failure) -> String {
    format!("not identifiable; {}", f.hedge)
}

fn write_failure(out: &mut dyn Write, f: &Failure, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(f).expect("failure serializes")),
        _ => writeln!(out, "{}", hedge_text(f)),
    }
}

fn write_deviation(out: &mut dyn Write, d: &Deviation<f64>, trials: u64) -> std::io::Result<()> {
    writeln!(
        out,
        "max deviation: {:.3e} over {} cells in {trials} models ({} skipped)",
        d.max, d.compared, d.skipped
    )
}

/// Values bound in the query must fit the binary models used for checking.
fn check_binary_values(q: &Query) -> Result<(), CliError> {
    match q.values.iter().find(|(_, &v)| v >= 2) {
        Some((n, v)) => Err(CliError::Usage(format!(
            "value {n}={v} is outside the binary domain used for verification"
        ))),
        None => Ok(()),
    }
}

fn load_plan(path: &Path, outcome: Option<&str>) -> Result<Plan, CliError> {
    let text = read(path)?;
    let bad = |message: String| CliError::PlanFile {
        path: path.to_path_buf(),
        message,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let mut plan = if value.is_array() {
        let stages: Vec<Stage> = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        Plan {
            outcome: VarSet::new(),
            stages,
            domains: Default::default(),
        }
    } else {
        serde_json::from_value(value).map_err(|e| bad(e.to_string()))?
    };
    if let Some(o) = outcome {
        plan.outcome = names(o);
    }
    if plan.outcome.is_empty() {
        return Err(bad("no outcome: give --outcome or an \"outcome\" field".into()));
    }
    Ok(plan)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Usage(e.to_string());
    match cmd {
        Command::Identify { graph, query, format } => {
            let g = load_graph(&graph)?;
            let q = Query::parse(&query)?;
            match idc_query(&g, &q)? {
                IdentResult::Identified(e) => {
                    writeln!(out, "{}", e.render(format.into())).map_err(io)?;
                    Ok(EXIT_OK)
                }
                IdentResult::NotIdentifiable(f) => {
                    write_failure(out, &f, format).map_err(io)?;
                    Ok(EXIT_NOT_IDENTIFIABLE)
                }
            }
        }
        Command::Dsep { graph, x, y, given } => {
            let g = load_graph(&graph)?;
            let sep = d_separated(&g, &names(&x), &names(&y), &names(&given))?;
            writeln!(out, "{sep}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Components { graph, format } => {
            let g = load_graph(&graph)?;
            let p = c_components(&g);
            match format {
                ReportFormat::Text => {
                    for b in &p.blocks {
                        writeln!(out, "{b}").map_err(io)?;
                    }
                }
                ReportFormat::Json => {
                    writeln!(out, "{}", serde_json::to_string(&p.blocks).expect("sets serialize")).map_err(io)?
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            graph,
            query,
            trials,
            seed,
            tolerance,
        } => {
            let g = load_graph(&graph)?;
            let q = Query::parse(&query)?;
            check_binary_values(&q)?;
            let e = match idc_query(&g, &q)? {
                IdentResult::Identified(e) => e,
                IdentResult::NotIdentifiable(f) => {
                    write_failure(out, &f, Format::Text).map_err(io)?;
                    return Ok(EXIT_NOT_IDENTIFIABLE);
                }
            };
            let d = verify_query(&g, &q, &e, trials, seed)?;
            writeln!(out, "estimand: {e}").map_err(io)?;
            write_deviation(out, &d, trials).map_err(io)?;
            Ok(if d.max <= tolerance { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Compare { graph, query, format } => {
            let g = load_graph(&graph)?;
            let q = Query::parse(&query)?;
            let r = unsoundness_report(&g, &q, &SearchBounds::default())?;
            match format {
                ReportFormat::Text => writeln!(out, "{r}"),
                ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("report serializes")),
            }
            .map_err(io)?;
            Ok(if r.classification.is_bug() { EXIT_CHECK_FAILED } else { EXIT_OK })
        }
        Command::Plan {
            graph,
            plan,
            outcome,
            trials,
            seed,
            tolerance,
            format,
        } => {
            let g = load_graph(&graph)?;
            let p = load_plan(&plan, outcome.as_deref())?;
            let e = match identify_plan(&g, &p)? {
                IdentResult::Identified(e) => e,
                IdentResult::NotIdentifiable(f) => {
                    write_failure(out, &f, format).map_err(io)?;
                    return Ok(EXIT_NOT_IDENTIFIABLE);
                }
            };
            if format == Format::Json {
                writeln!(out, "{}", e.to_json()).map_err(io)?;
                return Ok(EXIT_OK);
            }
            writeln!(out, "{}", e.render(format.into())).map_err(io)?;
            check_plan(out, &g, &p, &e, trials, seed, tolerance)
        }
    }
}

fn check_plan(
    out: &mut dyn Write,
    g: &Admg,
    p: &Plan,
    e: &ProbExpr,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Usage(e.to_string());
    let sizes: BTreeSet<usize> = g.nodes().iter().map(|n| p.domain(n)).collect();
    let [size] = sizes.into_iter().collect::<Vec<_>>()[..] else {
        writeln!(out, "oracle check skipped: variables have different domain sizes").map_err(io)?;
        return Ok(EXIT_OK);
    };
    let mut worst = Deviation::default();
    for i in 0..trials {
        let m = random_scm(g, size, seed.wrapping_add(i));
        worst.merge(plan_deviation::<f64>(&m, p, e)?);
    }
    write_deviation(out, &worst, trials).map_err(io)?;
    Ok(if worst.max <= tolerance { EXIT_OK } else { EXIT_CHECK_FAILED })
}
