//! Request handling shared by the CLI and the HTTP service, so both emit the
//! same canonical bytes for the same request.

use std::borrow::Cow;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use hazalloc::io::{canonical_bytes, model_summary, scenario_summary, write_report, ModelBundle, Report, ReportFormat, RequestEcho};
use hazalloc::model::{Portfolio, ProjectId};
use hazalloc::scenario::{apply_scenario, diff_allocations};
use hazalloc::solver::{budget_sweep_limited, solve, SolveRequest, DEFAULT_MAX_FREE_EXACT};
use hazalloc::{Error, Result, RiskModel};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBody {
    pub budget: f64,
    #[serde(default)]
    pub locked: BTreeSet<ProjectId>,
    #[serde(default)]
    pub banned: BTreeSet<ProjectId>,
    #[serde(default)]
    pub scenario: Option<String>,
    /// Seconds; the service default applies when absent.
    #[serde(default)]
    pub time_limit: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBody {
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub locked: BTreeSet<ProjectId>,
    #[serde(default)]
    pub banned: BTreeSet<ProjectId>,
    #[serde(default)]
    pub scenario: Option<String>,
}

/// Structured error payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl From<&Error> for ErrorBody {
    fn from(e: &Error) -> Self {
        ErrorBody { code: error_code(e).into(), message: e.to_string(), field: e.field().map(str::to_owned) }
    }
}

pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::UnknownHazard(_) => "unknown_hazard",
        Error::UnknownProject(_) => "unknown_project",
        Error::UnknownScenario(_) => "unknown_scenario",
        Error::Validation { .. } => "validation",
        Error::Parse(_) => "parse",
        Error::Version { .. } => "version",
        Error::Infeasible(_) => "infeasible",
        Error::Capacity { .. } => "capacity",
        Error::Domain(_) => "domain",
        Error::Fit(_) => "fit",
        Error::Schema(_) => "schema",
        Error::Record { .. } => "record",
        Error::Usage(_) => "usage",
        Error::Io(_) => "io",
    }
}

/// An immutable model snapshot plus solve limits.
#[derive(Debug, Clone)]
pub struct Service {
    bundle: ModelBundle,
    model: RiskModel,
    pub max_free_exact: usize,
    pub default_time_limit: Option<f64>,
}

impl Service {
    pub fn new(bundle: ModelBundle) -> Self {
        let model = bundle.model();
        Service { bundle, model, max_free_exact: DEFAULT_MAX_FREE_EXACT, default_time_limit: None }
    }

    pub fn bundle(&self) -> &ModelBundle {
        &self.bundle
    }

    fn model_for(&self, scenario: Option<&str>) -> Result<Cow<'_, RiskModel>> {
        match scenario {
            None => Ok(Cow::Borrowed(&self.model)),
            Some(name) => Ok(Cow::Owned(apply_scenario(&self.model, self.bundle.scenario(name)?)?)),
        }
    }

    pub fn evaluate(&self, selection: &[u32], scenario: Option<&str>) -> Result<Report> {
        let model = self.model_for(scenario)?;
        let portfolio: Portfolio = selection.iter().copied().collect();
        Ok(Report::Evaluate {
            objective: model.total_expected_loss(&portfolio)?,
            cost: model.portfolio_cost(&portfolio)?,
            per_hazard_loss: model.loss_breakdown(&portfolio)?.into_iter().collect(),
            portfolio,
        })
    }

    pub fn solve(&self, body: &SolveBody) -> Result<Report> {
        let model = self.model_for(body.scenario.as_deref())?;
        let request = SolveRequest {
            budget: body.budget,
            locked: body.locked.clone(),
            banned: body.banned.clone(),
            time_limit: body.time_limit.or(self.default_time_limit),
        };
        let result = solve(&model, &request, self.max_free_exact)?;
        let echo = RequestEcho {
            budget: Some(body.budget),
            budgets: Vec::new(),
            locked: body.locked.clone(),
            banned: body.banned.clone(),
            scenario: body.scenario.clone(),
        };
        Ok(Report::Solve { request: echo, result })
    }

    pub fn sweep(&self, body: &SweepBody) -> Result<Report> {
        let model = self.model_for(body.scenario.as_deref())?;
        let points = budget_sweep_limited(&model, &body.budgets, &body.locked, &body.banned, self.max_free_exact)?;
        let echo = RequestEcho {
            budget: None,
            budgets: body.budgets.clone(),
            locked: body.locked.clone(),
            banned: body.banned.clone(),
            scenario: body.scenario.clone(),
        };
        Ok(Report::Sweep { request: echo, points })
    }

    /// Base and scenario solves at one budget, with their difference.
    pub fn compare(&self, name: &str, budget: f64) -> Result<Report> {
        let request = SolveRequest::new(budget);
        let base = solve(&self.model, &request, self.max_free_exact)?;
        let variant = solve(self.model_for(Some(name))?.as_ref(), &request, self.max_free_exact)?;
        let diff = diff_allocations(&base, &variant)?;
        Ok(Report::Scenario { scenario: name.to_owned(), base, variant, diff })
    }

    pub fn model_document(&self) -> Result<Vec<u8>> {
        Ok(canonical_bytes(&model_summary(&self.bundle)?))
    }

    pub fn scenarios_document(&self) -> Vec<u8> {
        canonical_bytes(&scenario_summary(&self.bundle))
    }
}

pub fn machine(report: &Report) -> Vec<u8> {
    write_report(report, ReportFormat::Machine)
}
