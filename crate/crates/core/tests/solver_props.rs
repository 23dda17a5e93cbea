mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hazalloc::model::{Portfolio, ProjectId};
use hazalloc::solver::{budget_sweep, greedy_incumbent, lower_bound, solve, solve_enumerate, solve_exact, SolveRequest};
use hazalloc::Error;

fn instance(seed: u64, hazards: usize, projects: usize) -> hazalloc::RiskModel {
    common::random_model(&mut ChaCha8Rng::seed_from_u64(seed), hazards, projects)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_matches_enumeration(seed in any::<u64>(), hazards in 1usize..5, projects in 1usize..12, frac in 0.0f64..1.1) {
        let m = instance(seed, hazards, projects);
        let request = SolveRequest::new(frac * m.total_cost());
        let a = solve_exact(&m, &request).unwrap();
        let b = solve_enumerate(&m, &request).unwrap();
        prop_assert!(common::rel_close(a.objective, b.objective, 1e-9), "{} vs {}", a.objective, b.objective);
        prop_assert_eq!(a.portfolio, b.portfolio);
        prop_assert!(a.optimal);
    }

    #[test]
    fn results_are_feasible_and_consistent(seed in any::<u64>(), projects in 1usize..14, frac in 0.0f64..1.0) {
        let m = instance(seed, 3, projects);
        let budget = frac * m.total_cost();
        let r = solve_exact(&m, &SolveRequest::new(budget)).unwrap();
        prop_assert!(r.spent <= budget);
        prop_assert_eq!(r.spent, m.portfolio_cost(&r.portfolio).unwrap());
        prop_assert_eq!(r.objective, m.total_expected_loss(&r.portfolio).unwrap());
        let sum: f64 = r.per_hazard_loss.values().sum();
        prop_assert!(common::rel_close(sum, r.objective, 1e-12));
    }

    #[test]
    fn greedy_is_feasible_and_never_better(seed in any::<u64>(), projects in 1usize..12, frac in 0.0f64..1.0) {
        let m = instance(seed, 4, projects);
        let request = SolveRequest::new(frac * m.total_cost());
        let g = greedy_incumbent(&m, &request).unwrap();
        let e = solve_exact(&m, &request).unwrap();
        prop_assert!(g.spent <= request.budget);
        prop_assert!(!g.optimal);
        prop_assert!(e.objective <= g.objective * (1.0 + 1e-12));
    }

    #[test]
    fn locks_are_kept_and_bans_avoided(seed in any::<u64>(), projects in 2usize..12) {
        let m = instance(seed, 3, projects);
        let request = SolveRequest::new(m.total_cost() / 2.0 + m.project(ProjectId(1)).unwrap().cost).lock([1]).ban([2]);
        let r = solve_exact(&m, &request).unwrap();
        prop_assert!(r.portfolio.contains(ProjectId(1)));
        prop_assert!(!r.portfolio.contains(ProjectId(2)));
        let oracle = solve_enumerate(&m, &request).unwrap();
        prop_assert_eq!(r.portfolio, oracle.portfolio);
    }

    #[test]
    fn sweep_is_non_increasing(seed in any::<u64>(), projects in 1usize..12) {
        let m = instance(seed, 3, projects);
        let budgets: Vec<f64> = (0..=8).map(|i| i as f64 * m.total_cost() / 8.0).collect();
        let sweep = budget_sweep(&m, &budgets, &BTreeSet::new(), &BTreeSet::new()).unwrap();
        for w in sweep.windows(2) {
            prop_assert!(w[1].result.objective <= w[0].result.objective * (1.0 + 1e-12));
        }
        let all: Portfolio = m.project_ids().collect();
        let floor = m.total_expected_loss(&all).unwrap();
        prop_assert!(common::rel_close(sweep.last().unwrap().result.objective, floor, 1e-9));
    }

    #[test]
    fn loss_is_monotone_in_the_selection(seed in any::<u64>(), projects in 1usize..10, mask in any::<u16>(), extra in any::<u16>()) {
        let m = instance(seed, 4, projects);
        let pick = |bits: u16| -> Portfolio { (0..projects as u32).filter(|k| bits >> k & 1 == 1).map(|k| k + 1).collect() };
        let small = pick(mask);
        let large = pick(mask | extra);
        prop_assert!(m.total_expected_loss(&large).unwrap() <= m.total_expected_loss(&small).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn lower_bound_is_below_every_completion(seed in any::<u64>(), projects in 2usize..10, fix in any::<u32>(), fill in any::<u16>()) {
        let m = instance(seed, 3, projects);
        let mut fixed_in = BTreeSet::new();
        let mut fixed_out = BTreeSet::new();
        for k in 0..projects as u32 {
            match fix >> (2 * k) & 3 {
                0 => { fixed_in.insert(ProjectId(k + 1)); }
                1 => { fixed_out.insert(ProjectId(k + 1)); }
                _ => {}
            }
        }
        let lb = lower_bound(&m, &fixed_in, &fixed_out).unwrap();
        let mut completion = fixed_in.clone();
        for k in 0..projects as u32 {
            let id = ProjectId(k + 1);
            if fill >> k & 1 == 1 && !fixed_out.contains(&id) {
                completion.insert(id);
            }
        }
        let value = m.total_expected_loss(&Portfolio { selected: completion }).unwrap();
        prop_assert!(lb <= value * (1.0 + 1e-12));
    }
}

#[test]
fn zero_budget_gives_empty_selection_and_baseline_loss() {
    let m = instance(3, 4, 9);
    let r = solve_exact(&m, &SolveRequest::new(0.0)).unwrap();
    assert!(r.portfolio.is_empty());
    assert_eq!(r.objective, m.total_expected_loss(&Portfolio::empty()).unwrap());
}

#[test]
fn request_errors() {
    let m = instance(5, 3, 6);
    assert!(matches!(solve_exact(&m, &SolveRequest::new(-5.0)), Err(Error::Usage(_))));
    let both = SolveRequest::new(100.0).lock([1]).ban([1]);
    match solve_exact(&m, &both) {
        Err(e @ Error::Validation { .. }) => assert_eq!(e.field(), Some("locked")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(solve_exact(&m, &SolveRequest::new(100.0).lock([99])), Err(Error::UnknownProject(99))));
    let all: Vec<u32> = (1..=6).collect();
    assert!(matches!(solve_exact(&m, &SolveRequest::new(1.0).lock(all)), Err(Error::Infeasible(_))));
    assert!(matches!(solve_exact(&m, &SolveRequest::new(1.0).with_time_limit(-1.0)), Err(Error::Usage(_))));
}

#[test]
fn large_requests_fall_back_to_greedy() {
    let m = instance(8, 3, 30);
    let request = SolveRequest::new(m.total_cost() / 3.0);
    let r = solve(&m, &request, 10).unwrap();
    assert!(!r.optimal);
    assert_eq!(r.portfolio, greedy_incumbent(&m, &request).unwrap().portfolio);
    assert!(solve(&m, &request, 30).unwrap().optimal);
}

#[test]
fn enumeration_refuses_large_instances() {
    let m = instance(8, 3, 30);
    assert!(matches!(solve_enumerate(&m, &SolveRequest::new(10.0)), Err(Error::Capacity { .. })));
}

#[test]
fn f32_and_f64_agree_on_small_instances() {
    let m = instance(11, 3, 10);
    let narrow = m.cast::<f32>();
    for frac in [0.1, 0.4, 0.8] {
        let budget = frac * m.total_cost();
        let wide = solve_exact(&m, &SolveRequest::new(budget)).unwrap();
        let small = solve_exact(&narrow, &SolveRequest::new(budget as f32)).unwrap();
        let value = m.total_expected_loss(&small.portfolio).unwrap();
        assert!(common::rel_close(value, wide.objective, 1e-4), "{value} vs {}", wide.objective);
    }
}
