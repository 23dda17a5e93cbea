use std::io::Write;
use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hazalloc::estimation::{estimate_hazard, SeverityCriteria};
use hazalloc::io::{canonical_bytes, load_bundle, load_event_csv, write_report, ColumnMap, ModelBundle, Report, ReportFormat};
use hazalloc::model::ProjectId;
use hazalloc::solver::{budget_range, DEFAULT_MAX_FREE_EXACT};
use hazalloc::Error;

use crate::api::{ErrorBody, Service, SolveBody, SweepBody};
use crate::server::{serve, ServiceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hazalloc", version, about = "Select mitigation projects under a budget to minimize expected hazard loss")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Machine,
    Table,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Machine => ReportFormat::Machine,
            Format::Table => ReportFormat::Table,
        }
    }
}

#[derive(Debug, Args)]
pub struct BundleArg {
    /// Model bundle; defaults to the shipped Iowa bundle.
    #[arg(long, env = "HAZALLOC_BUNDLE")]
    pub bundle: Option<PathBuf>,
}

impl BundleArg {
    fn load(&self) -> hazalloc::Result<ModelBundle> {
        match &self.bundle {
            Some(path) => load_bundle(path),
            None => Ok(ModelBundle::iowa()),
        }
    }
}

#[derive(Debug, Args)]
pub struct Constraints {
    /// Projects that must be selected, e.g. `--lock 2,20`.
    #[arg(long, value_delimiter = ',')]
    pub lock: Vec<u32>,
    /// Projects that must not be selected.
    #[arg(long, value_delimiter = ',')]
    pub ban: Vec<u32>,
    /// Named scenario from the bundle to apply first.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Free-project count above which the greedy heuristic is used.
    #[arg(long, default_value_t = DEFAULT_MAX_FREE_EXACT)]
    pub max_free_exact: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected loss of a given selection (empty by default).
    Evaluate {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long, value_delimiter = ',')]
        select: Vec<u32>,
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Best selection at one budget.
    Solve {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long, allow_negative_numbers = true)]
        budget: f64,
        #[command(flatten)]
        constraints: Constraints,
        /// Stop searching after this many seconds and report the best found.
        #[arg(long, allow_negative_numbers = true)]
        time_limit: Option<f64>,
    },
    /// Solve across budgets: `a,b,c` or `start:end:step`.
    Sweep {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long, allow_hyphen_values = true)]
        budgets: String,
        #[command(flatten)]
        constraints: Constraints,
    },
    /// Compare a named scenario with the base model at one budget.
    Scenario {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long)]
        name: String,
        #[arg(long, allow_negative_numbers = true)]
        budget: f64,
    },
    /// Annual probability and mean consequences from an event file.
    Estimate {
        #[arg(long)]
        events: PathBuf,
        /// JSON severity thresholds.
        #[arg(long)]
        criteria: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        span_years: f64,
        #[arg(long, default_value_t = 1980)]
        cutoff_year: i32,
        /// `default`, `storm-events`, or a JSON column map file.
        #[arg(long, default_value = "default")]
        columns: String,
    },
    /// Run the HTTP service.
    Serve {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long, env = "HAZALLOC_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Seconds a single solve may search.
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_FREE_EXACT)]
        max_free_exact: usize,
    },
}

/// `a,b,c` or inclusive `start:end:step`.
pub fn parse_budgets(spec: &str) -> hazalloc::Result<Vec<f64>> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Usage(format!("`{s}` is not a number")));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, end, step] => budget_range(num(start)?, num(end)?, num(step)?),
        [_] => spec.split(',').filter(|s| !s.trim().is_empty()).map(num).collect(),
        _ => Err(Error::Usage(format!("budgets `{spec}` must be a list or start:end:step"))),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => EXIT_USAGE,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        _ => EXIT_DATA,
    }
}

fn ids(v: &[u32]) -> std::collections::BTreeSet<ProjectId> {
    v.iter().copied().map(ProjectId).collect()
}

fn service(bundle: &BundleArg, max_free_exact: usize) -> hazalloc::Result<Service> {
    let mut s = Service::new(bundle.load()?);
    s.max_free_exact = max_free_exact;
    Ok(s)
}

fn columns(spec: &str) -> hazalloc::Result<ColumnMap> {
    match spec {
        "default" => Ok(ColumnMap::default()),
        "storm-events" => Ok(ColumnMap::storm_events()),
        path => serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Parse(format!("{path}: {e}"))),
    }
}

fn report(command: Command) -> hazalloc::Result<Report> {
    match command {
        Command::Evaluate { bundle, select, scenario } => service(&bundle, DEFAULT_MAX_FREE_EXACT)?.evaluate(&select, scenario.as_deref()),
        Command::Solve { bundle, budget, constraints, time_limit } => {
            let body = SolveBody {
                budget,
                locked: ids(&constraints.lock),
                banned: ids(&constraints.ban),
                scenario: constraints.scenario,
                time_limit,
            };
            service(&bundle, constraints.max_free_exact)?.solve(&body)
        }
        Command::Sweep { bundle, budgets, constraints } => {
            let body = SweepBody {
                budgets: parse_budgets(&budgets)?,
                locked: ids(&constraints.lock),
                banned: ids(&constraints.ban),
                scenario: constraints.scenario,
            };
            service(&bundle, constraints.max_free_exact)?.sweep(&body)
        }
        Command::Scenario { bundle, name, budget } => service(&bundle, DEFAULT_MAX_FREE_EXACT)?.compare(&name, budget),
        Command::Estimate { events, criteria, span_years, cutoff_year, columns: spec } => {
            let criteria: SeverityCriteria = serde_json::from_str(&std::fs::read_to_string(&criteria)?)
                .map_err(|e| Error::Parse(format!("{}: {e}", criteria.display())))?;
            let events = load_event_csv(&events, &columns(&spec)?)?;
            Ok(Report::Estimate { estimate: estimate_hazard(&events, cutoff_year, &criteria, span_years)? })
        }
        Command::Serve { .. } => unreachable!("serve is dispatched separately"),
    }
}

/// Runs one command, writing the report to `out` and errors to `err`.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let format = cli.format;
    let result = match cli.command {
        Command::Serve { bundle, port, bind, timeout, max_free_exact } => {
            let config = ServiceConfig { bind, port, bundle: bundle.bundle, request_timeout: timeout, max_free_exact };
            let runtime = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => return fail(&Error::Io(e), format, err),
            };
            runtime.block_on(serve(config)).map(|_| Vec::new())
        }
        command => report(command).map(|r| write_report(&r, format.into())),
    };
    match result {
        Ok(bytes) => match out.write_all(&bytes) {
            Ok(()) => EXIT_OK,
            Err(e) => fail(&Error::Io(e), format, err),
        },
        Err(e) => fail(&e, format, err),
    }
}

fn fail(e: &Error, format: Format, err: &mut impl Write) -> i32 {
    let _ = match format {
        Format::Machine => err.write_all(&canonical_bytes(&ErrorBody::from(e))),
        Format::Table => writeln!(err, "error: {e}"),
    };
    exit_code(e)
}

/// Parses `args` and runs; clap's own errors map to the usage exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}
