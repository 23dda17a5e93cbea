use std::cmp::Ordering;
use std::time::Instant;

use super::compiled::{Compiled, State};
use super::greedy::greedy_candidate;
use super::{finish, prepare, Candidate, SolveRequest, SolveResult};
use crate::error::Result;
use crate::model::RiskModel;
use crate::scalar::{tolerance, Scalar};

/// Exact branch-and-bound over the free projects.
///
/// Depth-first, select branch first, projects ordered by standalone loss
/// reduction per dollar from the empty portfolio. The incumbent starts from
/// [`greedy_incumbent`](super::greedy_incumbent). A node is bounded by the
/// larger of two valid bounds: the loss with every affordable undecided
/// project selected, and the current loss minus a fractional knapsack over
/// the undecided projects' marginal reductions. The second is valid because
/// loss reduction is submodular in the selection (each term is a product of
/// factors in (0, 1]), so marginal reductions only shrink as projects are
/// added.
///
/// When `time_limit` runs out the best incumbent is returned with
/// `optimal = false`.
pub fn solve_exact<T: Scalar>(model: &RiskModel<T>, request: &SolveRequest<T>) -> Result<SolveResult<T>> {
    let started = Instant::now();
    let prep = prepare(model, request)?;
    let compiled = Compiled::new(model);

    let empty = compiled.empty_state();
    let ratio: Vec<T> = (0..compiled.projects()).map(|k| compiled.gain(&empty, k) / compiled.cost[k]).collect();
    let mut order = prep.free.clone();
    order.sort_by(|&a, &b| ratio[b].partial_cmp(&ratio[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));

    let incumbent = greedy_candidate(&compiled, &prep.locked, &prep.free, prep.locked_cost, prep.budget);
    let mut search = Search {
        compiled: &compiled,
        order,
        budget: prep.budget,
        deadline: prep.deadline,
        incumbent,
        selected: prep.locked.clone(),
        nodes: 0,
        timed_out: false,
    };
    let root = compiled.state_of(prep.locked.iter().copied());
    search.offer(&root, prep.locked_cost);
    search.visit(0, &root, prep.locked_cost);

    let optimal = !search.timed_out;
    let nodes = search.nodes;
    finish(model, prep.budget, &search.incumbent.slots, optimal, nodes, started)
}

struct Search<'a, T> {
    compiled: &'a Compiled<T>,
    order: Vec<usize>,
    budget: T,
    deadline: Option<Instant>,
    incumbent: Candidate<T>,
    selected: Vec<usize>,
    nodes: u64,
    timed_out: bool,
}

impl<T: Scalar> Search<'_, T> {
    fn visit(&mut self, depth: usize, state: &State<T>, committed: T) {
        self.nodes += 1;
        if self.nodes % 256 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out || depth == self.order.len() {
            return;
        }

        let best = self.incumbent.objective;
        let tol = tolerance(best, best);
        let bound = self.bound(depth, state, self.budget - committed);
        if bound > best + tol {
            return;
        }
        // Nothing below can strictly improve, and every strict extension
        // costs more than the incumbent, so it would lose the tie-break.
        if bound >= best - tol && committed >= self.incumbent.cost - tolerance(committed, self.incumbent.cost) {
            return;
        }

        let k = self.order[depth];
        let cost = committed + self.compiled.cost[k];
        if cost <= self.budget {
            let child = self.compiled.with(state, k);
            self.selected.push(k);
            self.offer(&child, cost);
            self.visit(depth + 1, &child, cost);
            self.selected.pop();
        }
        self.visit(depth + 1, state, committed);
    }

    fn offer(&mut self, state: &State<T>, committed: T) {
        let objective = self.compiled.loss(state);
        let best = self.incumbent.objective;
        if objective > best + tolerance(objective, best) {
            return;
        }
        let mut slots = self.selected.clone();
        slots.sort_unstable();
        let cost = slots.iter().map(|&k| self.compiled.cost[k]).sum();
        debug_assert!(cost <= committed + tolerance(cost, committed));
        let candidate = Candidate::new(objective, cost, slots);
        if candidate.beats(&self.incumbent) {
            self.incumbent = candidate;
        }
    }

    fn bound(&self, depth: usize, state: &State<T>, remaining: T) -> T {
        let mut all = state.clone();
        let mut items: Vec<(T, T)> = Vec::new();
        for &k in &self.order[depth..] {
            let cost = self.compiled.cost[k];
            if cost > remaining {
                continue;
            }
            self.compiled.apply(&mut all, k);
            let gain = self.compiled.gain(state, k);
            if gain > T::zero() {
                items.push((gain, cost));
            }
        }
        let with_all = self.compiled.loss(&all);

        items.sort_by(|a, b| (b.0 / b.1).partial_cmp(&(a.0 / a.1)).unwrap_or(Ordering::Equal));
        let mut room = remaining;
        let mut reduction = T::zero();
        for (gain, cost) in items {
            if cost <= room {
                reduction = reduction + gain;
                room = room - cost;
            } else {
                reduction = reduction + gain * room / cost;
                break;
            }
        }
        let knapsack = self.compiled.loss(state) - reduction;
        with_all.max(knapsack)
    }
}
