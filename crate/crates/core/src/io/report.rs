//! Result documents in two renderings: a canonical machine form (sorted
//! keys, numbers rounded to 6 significant digits, no timings) and an
//! aligned plain-text table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::bundle::{ModelBundle, SourceKind};
use crate::estimation::HazardEstimate;
use crate::model::{Portfolio, ProjectId};
use crate::scenario::AllocationDiff;
use crate::{Result, SolveResult, SweepPoint};

/// Significant digits kept for every number in the machine format.
pub const SIGNIFICANT_DIGITS: usize = 6;

/// Keys dropped from machine output because they vary between runs.
const VOLATILE: [&str; 1] = ["wall_time"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Machine,
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "machine" => Ok(ReportFormat::Machine),
            "table" => Ok(ReportFormat::Table),
            other => Err(crate::Error::Usage(format!("unknown format `{other}` (machine or table)"))),
        }
    }
}

/// Constraints a solve or sweep was run with, echoed in its report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RequestEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub locked: BTreeSet<ProjectId>,
    #[serde(default)]
    pub banned: BTreeSet<ProjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Evaluate {
        portfolio: Portfolio,
        objective: f64,
        cost: f64,
        per_hazard_loss: BTreeMap<String, f64>,
    },
    Solve {
        request: RequestEcho,
        result: SolveResult,
    },
    Sweep {
        request: RequestEcho,
        points: Vec<SweepPoint>,
    },
    Scenario {
        scenario: String,
        base: SolveResult,
        variant: SolveResult,
        diff: AllocationDiff<f64>,
    },
    Estimate {
        estimate: HazardEstimate,
    },
}

/// Renders `report` in the requested format; the machine form ends with a
/// newline and is byte-identical for identical inputs.
pub fn write_report(report: &Report, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Machine => canonical_bytes(report),
        ReportFormat::Table => table(report).into_bytes(),
    }
}

/// Canonical JSON for any serializable document.
pub fn canonical_bytes(doc: &impl Serialize) -> Vec<u8> {
    let value = canonical_value(serde_json::to_value(doc).expect("documents serialize"));
    let mut out = serde_json::to_vec_pretty(&value).expect("values serialize");
    out.push(b'\n');
    out
}

fn canonical_value(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(k, _)| !VOLATILE.contains(&k.as_str()))
                .map(|(k, v)| (k, canonical_value(v)))
                .collect::<Map<_, _>>(),
        ),
        Value::Array(items) => Value::Array(items.into_iter().map(canonical_value).collect()),
        Value::Number(n) if n.is_f64() => round_sig(n.as_f64().unwrap_or(0.0))
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
        other => other,
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] through the decimal representation, so
/// the printed value is the shortest form of the rounded number.
fn round_sig(x: f64) -> Option<f64> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(0.0);
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().ok()
}

/// Summary served to front ends: hazards with their no-mitigation loss,
/// projects with reconstruction flags, scheme and scenario names.
pub fn model_summary(bundle: &ModelBundle) -> Result<Value> {
    let model = bundle.model();
    let empty = Portfolio::empty();
    let reconstructed: BTreeSet<ProjectId> = bundle.reconstructed_projects().into_iter().collect();
    let hazards: Vec<Value> = bundle
        .hazards
        .iter()
        .map(|h| {
            Ok(serde_json::json!({
                "id": h.id,
                "name": h.name,
                "baseline_probability": h.baseline_probability,
                "baseline_consequences": h.baseline_consequences,
                "expected_loss": model.hazard_expected_loss(&h.id, &empty)?,
            }))
        })
        .collect::<Result<_>>()?;
    let projects: Vec<Value> = bundle
        .projects
        .iter()
        .map(|p| {
            serde_json::json!({
                "id": p.id,
                "name": p.name,
                "cost": p.cost,
                "grade": p.grade,
                "all_hazard": p.all_hazard,
                "hazards": p.applicability.iter().map(|a| a.hazard.as_str()).collect::<Vec<_>>(),
                "reconstructed": reconstructed.contains(&p.id),
            })
        })
        .collect();
    let placeholder_scenarios: Vec<&str> = bundle
        .scenarios
        .iter()
        .filter(|s| {
            bundle
                .numeric_paths()
                .iter()
                .filter(|path| path.starts_with(&format!("scenarios/{}/", s.name)))
                .any(|path| bundle.provenance.lookup(path).is_some_and(|n| n.kind == SourceKind::Placeholder))
        })
        .map(|s| s.name.as_str())
        .collect();
    Ok(serde_json::json!({
        "name": bundle.name,
        "format_version": bundle.format_version,
        "hazards": hazards,
        "projects": projects,
        "scheme": bundle.scheme,
        "weights": bundle.weights,
        "no_mitigation_loss": model.total_expected_loss(&empty)?,
        "total_cost": model.total_cost(),
        "scenarios": bundle.scenarios.iter().map(|s| s.name.as_str()).collect::<Vec<_>>(),
        "provenance": {
            "reconstructed_projects": reconstructed,
            "placeholder_scenarios": placeholder_scenarios,
        },
    }))
}

/// Named scenarios with what each one changes.
pub fn scenario_summary(bundle: &ModelBundle) -> Value {
    let list: Vec<Value> = bundle
        .scenarios
        .iter()
        .map(|s| {
            serde_json::json!({
                "name": s.name,
                "description": s.description,
                "scheme_override": s.scheme_override,
                "consequence_overrides": s.consequence_override.len(),
                "budget_grid": s.budget_grid,
            })
        })
        .collect();
    serde_json::json!({ "scenarios": list })
}

fn dollars(x: f64) -> String {
    let neg = x < 0.0;
    let digits = format!("{:.0}", x.abs());
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    if neg {
        format!("-${out}")
    } else {
        format!("${out}")
    }
}

fn ids(p: &BTreeSet<ProjectId>) -> String {
    if p.is_empty() {
        return "(none)".into();
    }
    p.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(", ")
}

fn table(report: &Report) -> String {
    let mut s = String::new();
    match report {
        Report::Evaluate { portfolio, objective, cost, per_hazard_loss } => {
            let _ = writeln!(s, "{:<12}{}", "selected", ids(&portfolio.selected));
            let _ = writeln!(s, "{:<12}{}", "cost", dollars(*cost));
            let _ = writeln!(s, "{:<12}{}", "objective", dollars(*objective));
            breakdown(&mut s, per_hazard_loss);
        }
        Report::Solve { request, result } => {
            if let Some(name) = &request.scenario {
                let _ = writeln!(s, "{:<12}{}", "scenario", name);
            }
            solve_block(&mut s, result);
            breakdown(&mut s, &result.per_hazard_loss);
        }
        Report::Sweep { points, .. } => {
            let _ = writeln!(s, "{:>16}  {:>18}  {:>16}  {:<7}  selected", "budget", "objective", "spent", "optimal");
            for p in points {
                let r = &p.result;
                let _ = writeln!(
                    s,
                    "{:>16}  {:>18}  {:>16}  {:<7}  {}",
                    dollars(p.budget),
                    dollars(r.objective),
                    dollars(r.spent),
                    if r.optimal { "yes" } else { "no" },
                    ids(&r.portfolio.selected)
                );
            }
        }
        Report::Scenario { scenario, base, variant, diff } => {
            let _ = writeln!(s, "{:<12}{}", "scenario", scenario);
            let _ = writeln!(s, "{:<12}{}", "budget", dollars(diff.budget));
            let _ = writeln!(s, "{:<12}{}  {}", "base", dollars(base.objective), ids(&base.portfolio.selected));
            let _ = writeln!(s, "{:<12}{}  {}", "variant", dollars(variant.objective), ids(&variant.portfolio.selected));
            let _ = writeln!(s, "{:<12}{}", "added", ids(&diff.added));
            let _ = writeln!(s, "{:<12}{}", "removed", ids(&diff.removed));
        }
        Report::Estimate { estimate } => {
            let _ = writeln!(s, "{:<24}{}", "qualifying events", estimate.qualifying_events);
            let _ = writeln!(s, "{:<24}{}", "span (years)", estimate.span_years);
            let _ = writeln!(s, "{:<24}{:.4}", "annual probability", estimate.annual_probability);
            for (kind, v) in &estimate.mean_consequences {
                let _ = writeln!(s, "{:<24}{:.4}", format!("mean {kind}"), v);
            }
        }
    }
    s
}

fn solve_block(s: &mut String, r: &SolveResult) {
    let _ = writeln!(s, "{:<12}{}", "budget", dollars(r.budget));
    let _ = writeln!(s, "{:<12}{}", "spent", dollars(r.spent));
    let _ = writeln!(s, "{:<12}{}", "objective", dollars(r.objective));
    let _ = writeln!(s, "{:<12}{}", "optimal", if r.optimal { "yes" } else { "no" });
    let _ = writeln!(s, "{:<12}{}", "selected", ids(&r.portfolio.selected));
}

fn breakdown(s: &mut String, losses: &BTreeMap<String, f64>) {
    let mut rows: Vec<_> = losses.iter().collect();
    rows.sort_by(|a, b| b.1.total_cmp(a.1).then(a.0.cmp(b.0)));
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<24}{:>18}", "hazard", "expected loss");
    for (h, v) in rows {
        let _ = writeln!(s, "{:<24}{:>18}", h, dollars(*v));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_exact, SolveRequest};

    #[test]
    fn rounding_keeps_six_significant_digits() {
        assert_eq!(round_sig(7_510_123_456.7), Some(7_510_120_000.0));
        assert_eq!(round_sig(0.204545454), Some(0.204545));
        assert_eq!(round_sig(24000.0), Some(24000.0));
        assert_eq!(round_sig(f64::NAN), None);
    }

    #[test]
    fn single_project_report_echoes_request() {
        let bundle = ModelBundle::iowa();
        let model = bundle.model();
        let request = SolveRequest::new(24_000.0);
        let result = solve_exact(&model, &request).unwrap();
        let report = Report::Solve {
            request: RequestEcho { budget: Some(24_000.0), ..RequestEcho::default() },
            result,
        };
        let v: Value = serde_json::from_slice(&write_report(&report, ReportFormat::Machine)).unwrap();
        assert_eq!(v["kind"], "solve");
        assert_eq!(v["request"]["budget"], 24000.0);
        assert_eq!(v["result"]["spent"], 24000.0);
        assert_eq!(v["result"]["portfolio"], serde_json::json!([20]));
        assert!(v["result"].get("wall_time").is_none());
    }

    #[test]
    fn machine_output_is_deterministic() {
        let model = ModelBundle::iowa().model();
        let run = || {
            let result = solve_exact(&model, &SolveRequest::new(600_000.0)).unwrap();
            write_report(&Report::Solve { request: RequestEcho::default(), result }, ReportFormat::Machine)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_sweep_is_a_valid_document() {
        let report = Report::Sweep { request: RequestEcho::default(), points: vec![] };
        let v: Value = serde_json::from_slice(&write_report(&report, ReportFormat::Machine)).unwrap();
        assert_eq!(v["points"], serde_json::json!([]));
        assert!(!write_report(&report, ReportFormat::Table).is_empty());
    }

    #[test]
    fn table_groups_thousands() {
        assert_eq!(dollars(7_510_123_456.4), "$7,510,123,456");
        assert_eq!(dollars(0.0), "$0");
        assert_eq!(dollars(999.0), "$999");
    }

    #[test]
    fn model_summary_flags_reconstructions() {
        let v = model_summary(&ModelBundle::iowa()).unwrap();
        assert_eq!(v["hazards"].as_array().unwrap().len(), 16);
        assert_eq!(v["projects"].as_array().unwrap().len(), 52);
        assert_eq!(v["provenance"]["placeholder_scenarios"], serde_json::json!(["thira-placeholder"]));
    }
}
