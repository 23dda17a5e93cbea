use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{solve, SolveRequest, SolveResult};
use crate::error::{Error, Result};
use crate::model::{ProjectId, RiskModel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepPoint<T> {
    pub budget: T,
    pub result: SolveResult<T>,
}

/// Solves the model exactly at each budget of an ascending grid.
pub fn budget_sweep<T: Scalar>(
    model: &RiskModel<T>,
    budgets: &[T],
    locked: &BTreeSet<ProjectId>,
    banned: &BTreeSet<ProjectId>,
) -> Result<Vec<SweepPoint<T>>> {
    budget_sweep_limited(model, budgets, locked, banned, usize::MAX)
}

/// [`budget_sweep`] with the greedy fallback of [`super::solve`].
pub fn budget_sweep_limited<T: Scalar>(
    model: &RiskModel<T>,
    budgets: &[T],
    locked: &BTreeSet<ProjectId>,
    banned: &BTreeSet<ProjectId>,
    max_free_exact: usize,
) -> Result<Vec<SweepPoint<T>>> {
    if budgets.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Usage("sweep budgets must be sorted ascending".into()));
    }
    budgets
        .iter()
        .map(|&budget| {
            let request = SolveRequest { budget, locked: locked.clone(), banned: banned.clone(), time_limit: None };
            Ok(SweepPoint { budget, result: solve(model, &request, max_free_exact)? })
        })
        .collect()
}

/// Grid `start, start + step, ...` up to and including `end`.
pub fn budget_range<T: Scalar>(start: T, end: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(start >= T::zero()) || !(end >= start) {
        return Err(Error::Usage(format!("invalid budget range {start}:{end}:{step}")));
    }
    let count = ((end - start) / step + T::of(1e-9)).floor().to_usize().unwrap_or(0);
    Ok((0..=count).map(|i| start + step * T::of(i as f64)).collect())
}
