use crate::model::{ConsequenceKind, Portfolio, ProjectId, RiskModel};
use crate::scalar::Scalar;

const M: usize = ConsequenceKind::COUNT;

/// Dense factor tables for fast incremental evaluation.
///
/// Each (hazard, consequence) pair is a term `coef * prod(factors)`, with
/// `coef = p_i * w_j * f_ij`; the probability product is kept per hazard.
#[derive(Debug, Clone)]
pub(crate) struct Compiled<T> {
    hazards: usize,
    coef: Vec<T>,
    alpha: Vec<T>,
    beta: Vec<T>,
    pub(crate) cost: Vec<T>,
}

/// Running attenuation products for a partial selection.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct State<T> {
    prob: Vec<T>,
    cons: Vec<T>,
}

impl<T: Scalar> Compiled<T> {
    pub(crate) fn new(model: &RiskModel<T>) -> Self {
        let n = model.hazards.len();
        let mut coef = Vec::with_capacity(n * M);
        for h in &model.hazards {
            for kind in ConsequenceKind::ALL {
                coef.push(h.baseline_probability * model.weights.get(kind) * h.baseline_consequences[kind]);
            }
        }
        let k = model.projects.len();
        let mut alpha = Vec::with_capacity(k * n);
        let mut beta = Vec::with_capacity(k * n * M);
        for p in &model.projects {
            for h in &model.hazards {
                let f = model.effective_factors(p.id, &h.id).expect("ids taken from the model");
                alpha.push(f.alpha);
                beta.extend(f.beta.0);
            }
        }
        Compiled { hazards: n, coef, alpha, beta, cost: model.projects.iter().map(|p| p.cost).collect() }
    }

    pub(crate) fn projects(&self) -> usize {
        self.cost.len()
    }

    pub(crate) fn empty_state(&self) -> State<T> {
        State { prob: vec![T::one(); self.hazards], cons: vec![T::one(); self.hazards * M] }
    }

    pub(crate) fn state_of(&self, slots: impl IntoIterator<Item = usize>) -> State<T> {
        let mut s = self.empty_state();
        for k in slots {
            self.apply(&mut s, k);
        }
        s
    }

    pub(crate) fn apply(&self, state: &mut State<T>, k: usize) {
        let a = &self.alpha[k * self.hazards..(k + 1) * self.hazards];
        for (p, &f) in state.prob.iter_mut().zip(a) {
            *p = *p * f;
        }
        let b = &self.beta[k * self.hazards * M..(k + 1) * self.hazards * M];
        for (c, &f) in state.cons.iter_mut().zip(b) {
            *c = *c * f;
        }
    }

    pub(crate) fn with(&self, state: &State<T>, k: usize) -> State<T> {
        let mut s = state.clone();
        self.apply(&mut s, k);
        s
    }

    pub(crate) fn loss(&self, state: &State<T>) -> T {
        let mut total = T::zero();
        for i in 0..self.hazards {
            let row = i * M..(i + 1) * M;
            let inner: T = self.coef[row.clone()].iter().zip(&state.cons[row]).map(|(&c, &f)| c * f).sum();
            total = total + state.prob[i] * inner;
        }
        total
    }

    /// Loss reduction from adding project `k` to `state`.
    pub(crate) fn gain(&self, state: &State<T>, k: usize) -> T {
        let a = &self.alpha[k * self.hazards..(k + 1) * self.hazards];
        let b = &self.beta[k * self.hazards * M..(k + 1) * self.hazards * M];
        let mut total = T::zero();
        for i in 0..self.hazards {
            let row = i * M..(i + 1) * M;
            let mut before = T::zero();
            let mut after = T::zero();
            for ((&c, &f), &bf) in self.coef[row.clone()].iter().zip(&state.cons[row.clone()]).zip(&b[row]) {
                let term = c * f;
                before = before + term;
                after = after + term * bf;
            }
            total = total + state.prob[i] * (before - a[i] * after);
        }
        total.max(T::zero())
    }
}

pub(crate) fn portfolio_of(slots: impl IntoIterator<Item = usize>) -> Portfolio {
    slots.into_iter().map(|s| ProjectId(s as u32 + 1)).collect()
}
