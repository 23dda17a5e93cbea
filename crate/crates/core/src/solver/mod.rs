//! Budget-constrained minimization of total expected loss over project
//! selections.
//!
//! [`solve_exact`] is a depth-first branch-and-bound, [`solve_enumerate`]
//! the brute-force reference it is tested against, and [`greedy_incumbent`]
//! the ratio heuristic that seeds it. Ties within the relative tolerance are
//! broken by lower total cost, then by the lexicographically smallest sorted
//! id list, so all three report the same optimum when they agree on value.

mod bnb;
mod compiled;
mod enumerate;
mod greedy;
mod sweep;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Portfolio, ProjectId, RiskModel};
use crate::scalar::{approx_eq, Scalar};

pub use bnb::solve_exact;
pub use enumerate::{solve_enumerate, ENUMERATION_LIMIT};
pub use greedy::greedy_incumbent;
pub use sweep::{budget_range, budget_sweep, budget_sweep_limited, SweepPoint};

/// Free-project count above which [`solve`] answers with the greedy
/// heuristic instead of the exact search.
pub const DEFAULT_MAX_FREE_EXACT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolveRequest<T> {
    pub budget: T,
    #[serde(default)]
    pub locked: BTreeSet<ProjectId>,
    #[serde(default)]
    pub banned: BTreeSet<ProjectId>,
    /// Seconds; `None` means no limit.
    #[serde(default)]
    pub time_limit: Option<f64>,
}

impl<T: Scalar> SolveRequest<T> {
    pub fn new(budget: T) -> Self {
        SolveRequest { budget, locked: BTreeSet::new(), banned: BTreeSet::new(), time_limit: None }
    }

    pub fn lock(mut self, ids: impl IntoIterator<Item = u32>) -> Self {
        self.locked.extend(ids.into_iter().map(ProjectId));
        self
    }

    pub fn ban(mut self, ids: impl IntoIterator<Item = u32>) -> Self {
        self.banned.extend(ids.into_iter().map(ProjectId));
        self
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolveResult<T> {
    pub budget: T,
    pub portfolio: Portfolio,
    pub objective: T,
    pub spent: T,
    pub per_hazard_loss: BTreeMap<String, T>,
    /// False for heuristic answers and for searches cut short by the time limit.
    pub optimal: bool,
    pub nodes_explored: u64,
    pub wall_time: f64,
}

/// Exact search when at most `max_free_exact` projects are free, otherwise
/// the greedy heuristic with `optimal` set to false.
pub fn solve<T: Scalar>(model: &RiskModel<T>, request: &SolveRequest<T>, max_free_exact: usize) -> Result<SolveResult<T>> {
    let free = prepare(model, request)?.free.len();
    if free > max_free_exact {
        log::info!("{free} free projects exceed the exact limit of {max_free_exact}; using greedy");
        greedy_incumbent(model, request)
    } else {
        solve_exact(model, request)
    }
}

/// Standalone lower bound on the objective of any completion of a partial
/// fixing: every undecided project is treated as selected and the budget is
/// ignored. Valid because every attenuation factor is at most 1.
pub fn lower_bound<T: Scalar>(
    model: &RiskModel<T>,
    fixed_in: &BTreeSet<ProjectId>,
    fixed_out: &BTreeSet<ProjectId>,
) -> Result<T> {
    if let Some(id) = fixed_in.intersection(fixed_out).next() {
        return Err(Error::Usage(format!("project {id} is both fixed in and fixed out")));
    }
    for &id in fixed_in.iter().chain(fixed_out) {
        model.project(id)?;
    }
    let rest: Portfolio = model.project_ids().filter(|id| !fixed_out.contains(id)).collect();
    model.total_expected_loss(&rest)
}

/// A validated request: locked slots, free slots, remaining budget.
pub(crate) struct Prepared<T> {
    pub(crate) budget: T,
    pub(crate) locked: Vec<usize>,
    pub(crate) free: Vec<usize>,
    pub(crate) locked_cost: T,
    pub(crate) deadline: Option<Instant>,
}

pub(crate) fn prepare<T: Scalar>(model: &RiskModel<T>, request: &SolveRequest<T>) -> Result<Prepared<T>> {
    if !(request.budget >= T::zero()) || !request.budget.is_finite() {
        return Err(Error::Usage(format!("budget {} must be a non-negative number", request.budget)));
    }
    if let Some(id) = request.locked.intersection(&request.banned).next() {
        return Err(Error::validation("locked", format!("project {id} is both locked and banned")));
    }
    for &id in request.locked.iter().chain(&request.banned) {
        model.project(id)?;
    }
    let locked_portfolio = Portfolio { selected: request.locked.clone() };
    let locked_cost = model.portfolio_cost(&locked_portfolio)?;
    if locked_cost > request.budget {
        return Err(Error::Infeasible(format!(
            "locked projects cost {locked_cost}, which exceeds the budget {}",
            request.budget
        )));
    }
    let deadline = match request.time_limit {
        Some(s) if !(s >= 0.0) || !s.is_finite() => {
            return Err(Error::Usage(format!("time limit {s} must be a non-negative number of seconds")))
        }
        Some(s) => Some(Instant::now() + Duration::from_secs_f64(s)),
        None => None,
    };
    Ok(Prepared {
        budget: request.budget,
        locked: request.locked.iter().map(|id| id.slot()).collect(),
        free: model
            .projects
            .iter()
            .filter(|p| !request.locked.contains(&p.id) && !request.banned.contains(&p.id))
            .map(|p| p.id.slot())
            .collect(),
        locked_cost,
        deadline,
    })
}

/// Objective, cost and sorted slot list of a candidate selection.
#[derive(Debug, Clone)]
pub(crate) struct Candidate<T> {
    pub(crate) objective: T,
    pub(crate) cost: T,
    pub(crate) slots: Vec<usize>,
}

impl<T: Scalar> Candidate<T> {
    pub(crate) fn new(objective: T, cost: T, mut slots: Vec<usize>) -> Self {
        slots.sort_unstable();
        Candidate { objective, cost, slots }
    }

    /// Tie-break order: objective (within tolerance), then cost, then ids.
    pub(crate) fn compare(&self, other: &Self) -> Ordering {
        if !approx_eq(self.objective, other.objective) {
            return self.objective.partial_cmp(&other.objective).unwrap_or(Ordering::Equal);
        }
        if !approx_eq(self.cost, other.cost) {
            return self.cost.partial_cmp(&other.cost).unwrap_or(Ordering::Equal);
        }
        self.slots.cmp(&other.slots)
    }

    pub(crate) fn beats(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Less
    }
}

pub(crate) fn finish<T: Scalar>(
    model: &RiskModel<T>,
    budget: T,
    slots: &[usize],
    optimal: bool,
    nodes: u64,
    started: Instant,
) -> Result<SolveResult<T>> {
    let portfolio = compiled::portfolio_of(slots.iter().copied());
    let per_hazard_loss: BTreeMap<String, T> = model.loss_breakdown(&portfolio)?.into_iter().collect();
    Ok(SolveResult {
        budget,
        objective: model.total_expected_loss(&portfolio)?,
        spent: model.portfolio_cost(&portfolio)?,
        portfolio,
        per_hazard_loss,
        optimal,
        nodes_explored: nodes,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
pub(crate) mod testing {
    use rand::Rng;

    use crate::model::*;

    /// Random model with `hazards` hazards and `projects` projects, costs in
    /// [1, 100], sparse applicability.
    pub(crate) fn random_model<R: Rng>(rng: &mut R, hazards: usize, projects: usize) -> RiskModel<f64> {
        let hs: Vec<Hazard<f64>> = (0..hazards)
            .map(|i| Hazard {
                id: format!("h{i}"),
                name: format!("hazard {i}"),
                baseline_probability: rng.gen_range(0.0..1.0),
                baseline_consequences: Consequences(std::array::from_fn(|_| {
                    if rng.gen_bool(0.3) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1000.0)
                    }
                })),
            })
            .collect();
        let weights = ConsequenceWeights(Consequences([50.0, 5.0, 1.0, 1.0, 0.5, 2.0]));
        let ps = (0..projects)
            .map(|k| {
                let all_hazard = rng.gen_bool(0.1);
                let mut applicability = Vec::new();
                for h in &hs {
                    if all_hazard || rng.gen_bool(0.4) {
                        let kinds: Vec<ConsequenceKind> =
                            ConsequenceKind::ALL.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
                        applicability.push(Applicability::new(h.id.clone(), rng.gen_bool(0.5), kinds));
                    }
                }
                Project {
                    id: ProjectId(k as u32 + 1),
                    name: format!("project {}", k + 1),
                    cost: rng.gen_range(1..=100) as f64,
                    grade: Grade::ALL[rng.gen_range(0..4)],
                    all_hazard,
                    applicability,
                }
            })
            .collect();
        RiskModel::new(hs, weights, ps, EffectivenessScheme::base(), 0.0).unwrap()
    }
}
