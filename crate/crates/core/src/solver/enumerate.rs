use std::time::Instant;

use super::{finish, prepare, Candidate, SolveRequest, SolveResult};
use crate::error::{Error, Result};
use crate::model::{Portfolio, ProjectId, RiskModel};
use crate::scalar::Scalar;

/// Largest number of free projects [`solve_enumerate`] accepts.
pub const ENUMERATION_LIMIT: usize = 25;

/// Evaluates every feasible selection of the free projects through the
/// model's own evaluation routines.
pub fn solve_enumerate<T: Scalar>(model: &RiskModel<T>, request: &SolveRequest<T>) -> Result<SolveResult<T>> {
    let started = Instant::now();
    let prep = prepare(model, request)?;
    if prep.free.len() > ENUMERATION_LIMIT {
        return Err(Error::Capacity { free: prep.free.len(), limit: ENUMERATION_LIMIT });
    }

    let mut best: Option<Candidate<T>> = None;
    let mut evaluated = 0u64;
    for mask in 0u32..(1u32 << prep.free.len()) {
        let slots: Vec<usize> = prep
            .locked
            .iter()
            .copied()
            .chain(prep.free.iter().enumerate().filter(|(bit, _)| mask >> bit & 1 == 1).map(|(_, &s)| s))
            .collect();
        let portfolio: Portfolio = slots.iter().map(|&s| ProjectId(s as u32 + 1)).collect();
        let cost = model.portfolio_cost(&portfolio)?;
        if cost > prep.budget {
            continue;
        }
        evaluated += 1;
        let candidate = Candidate::new(model.total_expected_loss(&portfolio)?, cost, slots);
        if best.as_ref().map_or(true, |b| candidate.beats(b)) {
            best = Some(candidate);
        }
    }
    let best = best.expect("the locked selection is always feasible");
    finish(model, prep.budget, &best.slots, true, evaluated, started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;

    /// Two hazards, three projects; every subset worked out by hand below.
    fn tiny() -> RiskModel<f64> {
        let hazards = vec![
            Hazard {
                id: "a".into(),
                name: "a".into(),
                baseline_probability: 0.5,
                baseline_consequences: Consequences([0.0, 0.0, 1000.0, 0.0, 0.0, 0.0]),
            },
            Hazard {
                id: "b".into(),
                name: "b".into(),
                baseline_probability: 0.2,
                baseline_consequences: Consequences([0.0, 0.0, 0.0, 2000.0, 0.0, 0.0]),
            },
        ];
        let weights = ConsequenceWeights(Consequences([1.0; 6]));
        let projects = vec![
            Project {
                id: ProjectId(1),
                name: "a-prob".into(),
                cost: 10.0,
                grade: Grade::A,
                all_hazard: false,
                applicability: vec![Applicability::new("a", true, [])],
            },
            Project {
                id: ProjectId(2),
                name: "b-crop".into(),
                cost: 10.0,
                grade: Grade::B,
                all_hazard: false,
                applicability: vec![Applicability::new("b", false, [ConsequenceKind::CropDamage])],
            },
            Project {
                id: ProjectId(3),
                name: "both".into(),
                cost: 15.0,
                grade: Grade::C,
                all_hazard: false,
                applicability: vec![
                    Applicability::new("a", false, [ConsequenceKind::PropertyDamage]),
                    Applicability::new("b", true, []),
                ],
            },
        ];
        RiskModel::new(hazards, weights, projects, EffectivenessScheme::base(), 0.0).unwrap()
    }

    /// Hand enumeration: loss = 500 * a1 * b3c + 400 * b2 * a3p with
    /// a1 = 0.9 (p1), b3c = 0.9 (p3 on a), b2 = 0.85 (p2), a3p = 0.95 (p3 on b).
    ///   {}      900        {1}    850       {2}    840      {3}    830
    ///   {1,2}   790        {1,3}  785       {2,3}  773      {1,2,3} 728
    #[test]
    fn matches_hand_enumeration() {
        let m = tiny();
        let table = [
            (vec![], 900.0),
            (vec![1], 850.0),
            (vec![2], 840.0),
            (vec![3], 830.0),
            (vec![1, 2], 790.0),
            (vec![1, 3], 785.0),
            (vec![2, 3], 773.0),
            (vec![1, 2, 3], 728.0),
        ];
        for (ids, loss) in &table {
            let p: Portfolio = ids.iter().copied().collect();
            assert!((m.total_expected_loss(&p).unwrap() - loss).abs() < 1e-9, "{ids:?}");
        }
        // budget -> best subset by hand from the table above
        for (budget, ids) in [(0.0, vec![]), (10.0, vec![2]), (15.0, vec![3]), (20.0, vec![1, 2]), (25.0, vec![2, 3]), (35.0, vec![1, 2, 3])] {
            let r = solve_enumerate(&m, &SolveRequest::new(budget)).unwrap();
            assert_eq!(r.portfolio.ids(), ids, "budget {budget}");
            assert!(r.optimal);
        }
    }

    #[test]
    fn zero_budget_gives_empty_portfolio() {
        let m = tiny();
        let r = solve_enumerate(&m, &SolveRequest::new(0.0)).unwrap();
        assert!(r.portfolio.is_empty());
        assert_eq!(r.objective, m.total_expected_loss(&Portfolio::empty()).unwrap());
    }

    #[test]
    fn ample_budget_selects_everything() {
        let m = tiny();
        let r = solve_enumerate(&m, &SolveRequest::new(1e9)).unwrap();
        assert_eq!(r.portfolio.ids(), vec![1, 2, 3]);
    }

    #[test]
    fn equal_objectives_prefer_cheaper_then_smaller_ids() {
        let mut m = tiny();
        // project 4 duplicates project 1 at the same cost; 5 duplicates it dearer
        let mut dup = m.projects[0].clone();
        dup.id = ProjectId(4);
        m.projects.push(dup.clone());
        dup.id = ProjectId(5);
        dup.cost = 11.0;
        m.projects.push(dup);
        let r = solve_enumerate(&m, &SolveRequest::new(10.0).ban([2])).unwrap();
        // {1} and {4} tie on objective and cost; {1} sorts first
        assert_eq!(r.portfolio.ids(), vec![1]);
        let r = solve_enumerate(&m, &SolveRequest::new(11.0).ban([1, 2, 4])).unwrap();
        assert_eq!(r.portfolio.ids(), vec![5]);
    }

    #[test]
    fn rejects_too_many_free_projects() {
        let mut m = tiny();
        for k in 4..=30 {
            let mut p = m.projects[0].clone();
            p.id = ProjectId(k);
            m.projects.push(p);
        }
        let err = solve_enumerate(&m, &SolveRequest::new(10.0)).unwrap_err();
        assert!(matches!(err, Error::Capacity { free: 30, limit: 25 }));
        // banning enough projects brings it back under the limit
        assert!(solve_enumerate(&m, &SolveRequest::new(10.0).ban(12..=30)).is_ok());
    }

    #[test]
    fn infeasible_locks_are_rejected() {
        let m = tiny();
        let err = solve_enumerate(&m, &SolveRequest::new(15.0).lock([1, 2])).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        let err = solve_enumerate(&m, &SolveRequest::new(15.0).lock([1]).ban([1])).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }
}
