use std::time::Instant;

use super::compiled::Compiled;
use super::{finish, prepare, Candidate, SolveRequest, SolveResult};
use crate::error::Result;
use crate::model::RiskModel;
use crate::scalar::Scalar;

/// Ratio heuristic: starting from the locked projects, repeatedly add the
/// affordable free project with the largest loss reduction per dollar until
/// no addition reduces the loss.
pub fn greedy_incumbent<T: Scalar>(model: &RiskModel<T>, request: &SolveRequest<T>) -> Result<SolveResult<T>> {
    let started = Instant::now();
    let prep = prepare(model, request)?;
    let compiled = Compiled::new(model);
    let (slots, steps) = greedy_slots(&compiled, &prep.locked, &prep.free, prep.locked_cost, prep.budget);
    finish(model, prep.budget, &slots, false, steps, started)
}

/// Greedy selection on compiled tables; returns the chosen slots (locked
/// included) and the number of additions made.
pub(crate) fn greedy_slots<T: Scalar>(
    compiled: &Compiled<T>,
    locked: &[usize],
    free: &[usize],
    locked_cost: T,
    budget: T,
) -> (Vec<usize>, u64) {
    let mut state = compiled.state_of(locked.iter().copied());
    let mut chosen: Vec<usize> = locked.to_vec();
    let mut remaining: Vec<usize> = free.to_vec();
    let mut spent = locked_cost;
    let mut steps = 0;
    loop {
        let loss = compiled.loss(&state);
        let mut pick: Option<(usize, T)> = None;
        for (pos, &k) in remaining.iter().enumerate() {
            if spent + compiled.cost[k] > budget {
                continue;
            }
            let gain = compiled.gain(&state, k);
            if gain <= T::rel_tol() * loss {
                continue;
            }
            let ratio = gain / compiled.cost[k];
            // strict comparison keeps the lowest slot on equal ratios
            if pick.map_or(true, |(_, best)| ratio > best) {
                pick = Some((pos, ratio));
            }
        }
        let Some((pos, _)) = pick else { break };
        let k = remaining.remove(pos);
        compiled.apply(&mut state, k);
        spent = spent + compiled.cost[k];
        chosen.push(k);
        steps += 1;
    }
    (chosen, steps)
}

/// Greedy answer as a tie-break candidate.
pub(crate) fn greedy_candidate<T: Scalar>(
    compiled: &Compiled<T>,
    locked: &[usize],
    free: &[usize],
    locked_cost: T,
    budget: T,
) -> Candidate<T> {
    let (slots, _) = greedy_slots(compiled, locked, free, locked_cost, budget);
    let objective = compiled.loss(&compiled.state_of(slots.iter().copied()));
    let mut sorted = slots.clone();
    sorted.sort_unstable();
    let cost = sorted.iter().map(|&k| compiled.cost[k]).sum();
    Candidate::new(objective, cost, sorted)
}
