//! Sensitivity analysis: alternate grade tables, consequence overrides, and
//! allocation differences between a base and a variant solve.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ConsequenceKind, EffectivenessScheme, ProjectId, RiskModel};
use crate::scalar::Scalar;
use crate::solver::{budget_sweep, SolveResult, SweepPoint};

/// Replacement baseline for one consequence of one hazard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ConsequenceOverride<T> {
    pub hazard: String,
    pub kind: ConsequenceKind,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Scenario<T> {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme_override: Option<EffectivenessScheme<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub consequence_override: Vec<ConsequenceOverride<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budget_grid: Vec<T>,
}

impl<T: Scalar> Scenario<T> {
    /// A scenario that changes nothing.
    pub fn base(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            description: None,
            scheme_override: None,
            consequence_override: Vec::new(),
            budget_grid: Vec::new(),
        }
    }

    pub fn with_scheme(mut self, scheme: EffectivenessScheme<T>) -> Self {
        self.scheme_override = Some(scheme);
        self
    }

    pub fn with_override(mut self, hazard: impl Into<String>, kind: ConsequenceKind, value: T) -> Self {
        self.consequence_override.push(ConsequenceOverride { hazard: hazard.into(), kind, value });
        self
    }

    /// Checks the scenario's own invariants; references to hazards are
    /// checked against a model in [`apply_scenario`].
    pub fn validate(&self) -> Result<()> {
        let path = format!("scenarios/{}", self.name);
        if let Some(scheme) = &self.scheme_override {
            scheme.validate(&format!("{path}/scheme_override"))?;
        }
        let mut seen = BTreeSet::new();
        for o in &self.consequence_override {
            let at = format!("{path}/consequence_override/{}/{}", o.hazard, o.kind);
            if !(o.value >= T::zero()) || !o.value.is_finite() {
                return Err(Error::validation(at, format!("override {} must be non-negative", o.value)));
            }
            if !seen.insert((o.hazard.as_str(), o.kind)) {
                return Err(Error::validation(at, "duplicate override"));
            }
        }
        if self.budget_grid.windows(2).any(|w| !(w[0] <= w[1])) || self.budget_grid.iter().any(|b| !(*b >= T::zero())) {
            return Err(Error::validation(format!("{path}/budget_grid"), "budgets must be non-negative and ascending"));
        }
        Ok(())
    }
}

/// Returns a copy of `model` with the scenario's scheme and consequence
/// overrides applied.
pub fn apply_scenario<T: Scalar>(model: &RiskModel<T>, scenario: &Scenario<T>) -> Result<RiskModel<T>> {
    scenario.validate()?;
    let mut out = model.clone();
    if let Some(scheme) = scenario.scheme_override {
        out.scheme = scheme;
    }
    for o in &scenario.consequence_override {
        let hazard = out
            .hazards
            .iter_mut()
            .find(|h| h.id == o.hazard)
            .ok_or_else(|| Error::UnknownHazard(o.hazard.clone()))?;
        hazard.baseline_consequences[o.kind] = o.value;
    }
    out.validate()?;
    Ok(out)
}

/// Budget sweep of each scenario's transformed model, keyed by scenario name.
pub fn run_sensitivity<T: Scalar>(
    model: &RiskModel<T>,
    scenarios: &[Scenario<T>],
    budget_grid: &[T],
) -> Result<BTreeMap<String, Vec<SweepPoint<T>>>> {
    let none = BTreeSet::new();
    scenarios
        .iter()
        .map(|s| {
            let variant = apply_scenario(model, s)?;
            Ok((s.name.clone(), budget_sweep(&variant, budget_grid, &none, &none)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AllocationDiff<T> {
    pub budget: T,
    pub added: BTreeSet<ProjectId>,
    pub removed: BTreeSet<ProjectId>,
    pub objective_base: T,
    pub objective_scenario: T,
}

/// Projects the variant selects that the base does not, and vice versa.
pub fn diff_allocations<T: Scalar>(base: &SolveResult<T>, variant: &SolveResult<T>) -> Result<AllocationDiff<T>> {
    if base.budget != variant.budget {
        return Err(Error::Usage(format!(
            "cannot compare allocations at different budgets ({} vs {})",
            base.budget, variant.budget
        )));
    }
    let b = &base.portfolio.selected;
    let v = &variant.portfolio.selected;
    Ok(AllocationDiff {
        budget: base.budget,
        added: v.difference(b).copied().collect(),
        removed: b.difference(v).copied().collect(),
        objective_base: base.objective,
        objective_scenario: variant.objective,
    })
}
