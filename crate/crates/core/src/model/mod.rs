//! Hazards, projects and the expected-loss evaluation.
//!
//! A hazard's probability is its baseline times the alpha factor of every
//! selected project that reduces it; each consequence is its baseline times
//! the matching beta factors. The objective is the sum over hazards of
//! probability times the dollar-weighted consequences.

mod consequence;
mod project;
mod scheme;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use consequence::{ConsequenceKind, Consequences};
pub use project::{Applicability, Project, ProjectId};
pub use scheme::{EffectivenessScheme, Grade, GradeTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Hazard<T> {
    pub id: String,
    pub name: String,
    pub baseline_probability: T,
    pub baseline_consequences: Consequences<T>,
}

impl<T: Scalar> Hazard<T> {
    pub fn cast<U: Scalar>(&self) -> Hazard<U> {
        Hazard {
            id: self.id.clone(),
            name: self.name.clone(),
            baseline_probability: U::of(self.baseline_probability.to_f64_lossy()),
            baseline_consequences: self.baseline_consequences.map(|_, v| U::of(v.to_f64_lossy())),
        }
    }
}

/// Dollars per unit of each consequence kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct ConsequenceWeights<T>(pub Consequences<T>);

impl<T: Scalar> ConsequenceWeights<T> {
    pub fn get(&self, kind: ConsequenceKind) -> T {
        self.0[kind]
    }

    pub fn scaled(&self, factor: T) -> Self {
        ConsequenceWeights(self.0.map(|_, w| w * factor))
    }
}

/// A set of selected projects.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Portfolio {
    pub selected: BTreeSet<ProjectId>,
}

impl Portfolio {
    pub fn empty() -> Self {
        Portfolio::default()
    }

    pub fn contains(&self, id: ProjectId) -> bool {
        self.selected.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.selected.iter().map(|p| p.0).collect()
    }
}

impl<I: Into<ProjectId>> FromIterator<I> for Portfolio {
    fn from_iter<It: IntoIterator<Item = I>>(iter: It) -> Self {
        Portfolio { selected: iter.into_iter().map(Into::into).collect() }
    }
}

/// Attenuation factors of one project on one hazard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factors<T> {
    pub alpha: T,
    pub beta: Consequences<T>,
}

impl<T: Scalar> Factors<T> {
    pub fn identity() -> Self {
        Factors { alpha: T::one(), beta: Consequences::splat(T::one()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RiskModel<T> {
    pub hazards: Vec<Hazard<T>>,
    pub weights: ConsequenceWeights<T>,
    pub projects: Vec<Project<T>>,
    pub scheme: EffectivenessScheme<T>,
    #[serde(default)]
    pub budget: T,
}

impl<T: Scalar> RiskModel<T> {
    /// Builds a model and checks every structural invariant.
    pub fn new(
        hazards: Vec<Hazard<T>>,
        weights: ConsequenceWeights<T>,
        projects: Vec<Project<T>>,
        scheme: EffectivenessScheme<T>,
        budget: T,
    ) -> Result<Self> {
        let model = RiskModel { hazards, weights, projects, scheme, budget };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for h in &self.hazards {
            let path = format!("hazards/{}", h.id);
            if !seen.insert(h.id.as_str()) {
                return Err(Error::validation(path, "duplicate hazard id"));
            }
            let p = h.baseline_probability;
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::validation(
                    format!("{path}/baseline_probability"),
                    format!("probability {p} outside [0, 1] for hazard `{}`", h.id),
                ));
            }
            for (kind, v) in h.baseline_consequences.iter() {
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err(Error::validation(
                        format!("{path}/baseline_consequences/{kind}"),
                        format!("consequence {v} is negative or not finite"),
                    ));
                }
            }
        }

        for (kind, w) in self.weights.0.iter() {
            let path = format!("weights/{kind}");
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::validation(path, format!("weight {w} must be positive")));
            }
            if kind.is_monetary() && w != T::one() {
                return Err(Error::validation(path, "monetary consequences must have weight 1"));
            }
        }

        for (slot, p) in self.projects.iter().enumerate() {
            let path = format!("projects/{}", p.id);
            if p.id.0 as usize != slot + 1 {
                return Err(Error::validation(
                    path,
                    format!("project ids must be contiguous from 1 (expected {})", slot + 1),
                ));
            }
            if !(p.cost > T::zero()) || !p.cost.is_finite() {
                return Err(Error::validation(format!("{path}/cost"), format!("cost {} must be positive", p.cost)));
            }
            let mut covered = HashSet::new();
            for a in &p.applicability {
                if !seen.contains(a.hazard.as_str()) {
                    return Err(Error::validation(
                        format!("{path}/applicability/{}", a.hazard),
                        "unknown hazard id",
                    ));
                }
                if !covered.insert(a.hazard.as_str()) {
                    return Err(Error::validation(
                        format!("{path}/applicability/{}", a.hazard),
                        "duplicate hazard entry",
                    ));
                }
            }
            if p.all_hazard && covered.len() != self.hazards.len() {
                return Err(Error::validation(
                    format!("{path}/applicability"),
                    "all-hazard project must cover every hazard",
                ));
            }
        }

        self.scheme.validate("scheme")?;
        if !(self.budget >= T::zero()) {
            return Err(Error::validation("budget", "budget must be non-negative"));
        }
        Ok(())
    }

    pub fn hazard(&self, id: &str) -> Result<&Hazard<T>> {
        self.hazards.iter().find(|h| h.id == id).ok_or_else(|| Error::UnknownHazard(id.to_owned()))
    }

    pub fn project(&self, id: ProjectId) -> Result<&Project<T>> {
        self.projects
            .get(id.slot())
            .filter(|p| p.id == id)
            .ok_or(Error::UnknownProject(id.0))
    }

    pub fn project_ids(&self) -> impl Iterator<Item = ProjectId> + '_ {
        self.projects.iter().map(|p| p.id)
    }

    pub fn check_portfolio(&self, portfolio: &Portfolio) -> Result<()> {
        for &id in &portfolio.selected {
            self.project(id)?;
        }
        Ok(())
    }

    /// Alpha and beta factors of `project_id` on `hazard_id`; identity when
    /// the project does not apply to the hazard.
    pub fn effective_factors(&self, project_id: ProjectId, hazard_id: &str) -> Result<Factors<T>> {
        let project = self.project(project_id)?;
        self.hazard(hazard_id)?;
        Ok(self.factors_of(project, hazard_id))
    }

    fn factors_of(&self, project: &Project<T>, hazard_id: &str) -> Factors<T> {
        let Some(app) = project.applies_to(hazard_id) else {
            return Factors::identity();
        };
        let alpha = if app.reduces_probability { self.scheme.alpha(project.grade) } else { T::one() };
        let applied = self.scheme.beta(project.grade, project.all_hazard);
        let beta = Consequences::splat(T::one())
            .map(|kind, one| if app.reduced_consequences.contains(&kind) { applied } else { one });
        Factors { alpha, beta }
    }

    fn selected_projects<'a>(&'a self, portfolio: &'a Portfolio) -> Result<Vec<&'a Project<T>>> {
        portfolio.selected.iter().map(|&id| self.project(id)).collect()
    }

    /// Attenuated probability of `hazard_id` under `portfolio`.
    pub fn event_probability(&self, hazard_id: &str, portfolio: &Portfolio) -> Result<T> {
        let hazard = self.hazard(hazard_id)?;
        let selected = self.selected_projects(portfolio)?;
        Ok(self.probability_of(hazard, &selected))
    }

    fn probability_of(&self, hazard: &Hazard<T>, selected: &[&Project<T>]) -> T {
        selected
            .iter()
            .fold(hazard.baseline_probability, |p, proj| p * self.factors_of(proj, &hazard.id).alpha)
    }

    /// Attenuated consequence `kind` of `hazard_id` under `portfolio`.
    pub fn hazard_consequence(&self, hazard_id: &str, kind: ConsequenceKind, portfolio: &Portfolio) -> Result<T> {
        let hazard = self.hazard(hazard_id)?;
        let selected = self.selected_projects(portfolio)?;
        Ok(self.consequences_of(hazard, &selected)[kind])
    }

    fn consequences_of(&self, hazard: &Hazard<T>, selected: &[&Project<T>]) -> Consequences<T> {
        let mut out = hazard.baseline_consequences;
        for proj in selected {
            let f = self.factors_of(proj, &hazard.id);
            for kind in ConsequenceKind::ALL {
                out[kind] = out[kind] * f.beta[kind];
            }
        }
        out
    }

    fn loss_of(&self, hazard: &Hazard<T>, selected: &[&Project<T>]) -> T {
        let consequences = self.consequences_of(hazard, selected);
        let weighted: T = consequences.iter().map(|(k, v)| self.weights.get(k) * v).sum();
        self.probability_of(hazard, selected) * weighted
    }

    /// Expected dollar loss from one hazard.
    pub fn hazard_expected_loss(&self, hazard_id: &str, portfolio: &Portfolio) -> Result<T> {
        let hazard = self.hazard(hazard_id)?;
        let selected = self.selected_projects(portfolio)?;
        Ok(self.loss_of(hazard, &selected))
    }

    /// Expected dollar loss per hazard, in model order.
    pub fn loss_breakdown(&self, portfolio: &Portfolio) -> Result<Vec<(String, T)>> {
        let selected = self.selected_projects(portfolio)?;
        Ok(self.hazards.iter().map(|h| (h.id.clone(), self.loss_of(h, &selected))).collect())
    }

    /// The minimization objective: expected loss summed over hazards.
    pub fn total_expected_loss(&self, portfolio: &Portfolio) -> Result<T> {
        let selected = self.selected_projects(portfolio)?;
        Ok(self.hazards.iter().map(|h| self.loss_of(h, &selected)).sum())
    }

    /// Summed in ascending id order so equal sets always give the same bits.
    pub fn portfolio_cost(&self, portfolio: &Portfolio) -> Result<T> {
        self.selected_projects(portfolio).map(|ps| ps.iter().map(|p| p.cost).sum())
    }

    /// Budget boundary is inclusive.
    pub fn is_feasible(&self, portfolio: &Portfolio, budget: T) -> Result<bool> {
        Ok(self.portfolio_cost(portfolio)? <= budget)
    }

    pub fn total_cost(&self) -> T {
        self.projects.iter().map(|p| p.cost).sum()
    }

    /// Copy with the named hazard dropped; project references to it are removed.
    pub fn without_hazard(&self, hazard_id: &str) -> Result<Self> {
        self.hazard(hazard_id)?;
        let mut out = self.clone();
        out.hazards.retain(|h| h.id != hazard_id);
        for p in &mut out.projects {
            p.applicability.retain(|a| a.hazard != hazard_id);
        }
        Ok(out)
    }

    pub fn with_budget(mut self, budget: T) -> Self {
        self.budget = budget;
        self
    }

    pub fn cast<U: Scalar>(&self) -> RiskModel<U> {
        RiskModel {
            hazards: self.hazards.iter().map(Hazard::cast).collect(),
            weights: ConsequenceWeights(self.weights.0.map(|_, w| U::of(w.to_f64_lossy()))),
            projects: self.projects.iter().map(Project::cast).collect(),
            scheme: self.scheme.cast(),
            budget: U::of(self.budget.to_f64_lossy()),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use ConsequenceKind::*;

    pub(crate) fn consequences(v: [f64; 6]) -> Consequences<f64> {
        Consequences(v)
    }

    pub(crate) fn iowa_weights() -> ConsequenceWeights<f64> {
        ConsequenceWeights(consequences([11.6e6, 1.16e6, 1.0, 1.0, 2195.54, 103075.79]))
    }

    fn hazard(id: &str, p: f64, c: [f64; 6]) -> Hazard<f64> {
        Hazard { id: id.into(), name: id.into(), baseline_probability: p, baseline_consequences: consequences(c) }
    }

    fn project(id: u32, cost: f64, grade: Grade, apps: Vec<Applicability>) -> Project<f64> {
        Project { id: ProjectId(id), name: format!("p{id}"), cost, grade, all_hazard: false, applicability: apps }
    }

    /// Flood, tornado, earthquake rows of the Iowa table plus a zero hazard.
    fn sample() -> RiskModel<f64> {
        let hazards = vec![
            hazard("flood", 0.4545, [0.0, 20.0, 177_710_000.0, 249_361_667.0, 738.0, 136.0]),
            hazard("tornado", 0.6363, [1.178, 40.857, 48_436_927.0, 6_628_975.0, 853.0, 81.0]),
            hazard("earthquake", 0.0075, [30.0, 3114.0, 18_350_000_000.0, 0.0, 679.0, 60.0]),
            hazard("quiet", 0.5, [0.0; 6]),
        ];
        let all = ConsequenceKind::ALL;
        let projects = vec![
            project(1, 16_133.0, Grade::A, vec![Applicability::new("flood", true, all)]),
            project(2, 24_000.0, Grade::A, vec![Applicability::new("flood", true, all)]),
            project(3, 50_000.0, Grade::A, vec![Applicability::new("tornado", false, [Fatalities])]),
            {
                let mut p = project(
                    4,
                    300_000.0,
                    Grade::A,
                    ["flood", "tornado", "earthquake", "quiet"]
                        .iter()
                        .map(|h| Applicability::new(*h, false, all))
                        .collect(),
                );
                p.all_hazard = true;
                p
            },
        ];
        RiskModel::new(hazards, iowa_weights(), projects, EffectivenessScheme::base(), 0.0).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn effective_factors_follow_grade_table() {
        let m = sample();
        let f = m.effective_factors(ProjectId(1), "flood").unwrap();
        assert_eq!(f.alpha, 0.90);
        assert_eq!(f.beta[Injuries], 0.80);

        let f = m.effective_factors(ProjectId(4), "tornado").unwrap();
        assert_eq!(f.alpha, 1.0);
        assert!(close(f.beta[Fatalities], 0.90));

        let f = m.effective_factors(ProjectId(3), "flood").unwrap();
        assert_eq!(f, Factors::identity());

        let f = m.effective_factors(ProjectId(3), "tornado").unwrap();
        assert_eq!(f.beta[Fatalities], 0.80);
        assert_eq!(f.beta[Injuries], 1.0);
    }

    #[test]
    fn unknown_ids_are_identifier_errors() {
        let m = sample();
        assert!(matches!(m.effective_factors(ProjectId(9), "flood"), Err(Error::UnknownProject(9))));
        assert!(matches!(m.effective_factors(ProjectId(1), "drought"), Err(Error::UnknownHazard(_))));
        assert!(matches!(m.event_probability("drought", &Portfolio::empty()), Err(Error::UnknownHazard(_))));
        let bad: Portfolio = [7u32].into_iter().collect();
        assert!(matches!(m.total_expected_loss(&bad), Err(Error::UnknownProject(7))));
        assert!(matches!(m.portfolio_cost(&bad), Err(Error::UnknownProject(7))));
    }

    #[test]
    fn event_probability_examples() {
        let m = sample();
        assert_eq!(m.event_probability("flood", &Portfolio::empty()).unwrap(), 0.4545);
        let one: Portfolio = [1u32].into_iter().collect();
        assert!(close(m.event_probability("flood", &one).unwrap(), 0.40905));
        let two: Portfolio = [1u32, 2].into_iter().collect();
        assert!(close(m.event_probability("flood", &two).unwrap(), 0.368145));
    }

    #[test]
    fn hazard_consequence_examples() {
        let m = sample();
        assert_eq!(m.hazard_consequence("tornado", Fatalities, &Portfolio::empty()).unwrap(), 1.178);
        let p: Portfolio = [3u32].into_iter().collect();
        assert!(close(m.hazard_consequence("tornado", Fatalities, &p).unwrap(), 0.9424));
        let all: Portfolio = [1u32, 2, 3, 4].into_iter().collect();
        assert_eq!(m.hazard_consequence("earthquake", CropDamage, &all).unwrap(), 0.0);
    }

    #[test]
    fn earthquake_loss_matches_hand_arithmetic() {
        let m = sample();
        let expected =
            0.0075 * (30.0 * 11.6e6 + 3114.0 * 1.16e6 + 18.35e9 + 679.0 * 2195.54 + 60.0 * 103_075.79);
        let got = m.hazard_expected_loss("earthquake", &Portfolio::empty()).unwrap();
        assert!(close(got, expected));
        assert!((got - 1.674e8).abs() / 1.674e8 < 1e-3);
        assert_eq!(m.hazard_expected_loss("quiet", &[4u32].into_iter().collect()).unwrap(), 0.0);
    }

    #[test]
    fn costs_and_feasibility() {
        let m = sample();
        assert_eq!(m.portfolio_cost(&Portfolio::empty()).unwrap(), 0.0);
        let p: Portfolio = [1u32, 2].into_iter().collect();
        assert_eq!(m.portfolio_cost(&p).unwrap(), 40_133.0);
        assert!(m.is_feasible(&Portfolio::empty(), 0.0).unwrap());
        let p: Portfolio = [2u32].into_iter().collect();
        assert!(m.is_feasible(&p, 24_000.0).unwrap());
        assert!(!m.is_feasible(&p, 23_999.0).unwrap());
    }

    #[test]
    fn zero_hazard_model_has_zero_loss() {
        let m = RiskModel::new(vec![], iowa_weights(), vec![], EffectivenessScheme::base(), 0.0).unwrap();
        assert_eq!(m.total_expected_loss(&Portfolio::empty()).unwrap(), 0.0);
    }

    #[test]
    fn validation_names_the_offender() {
        let mut m = sample();
        m.hazards[1].baseline_probability = 1.2;
        let err = m.validate().unwrap_err();
        assert!(err.to_string().contains("tornado"), "{err}");

        let mut m = sample();
        m.projects[2].applicability.push(Applicability::new("tornado", true, []));
        assert!(m.validate().unwrap_err().to_string().contains("duplicate hazard entry"));

        let mut m = sample();
        m.projects[3].applicability.pop();
        assert!(m.validate().unwrap_err().to_string().contains("all-hazard"));

        let mut m = sample();
        m.projects[1].id = ProjectId(5);
        assert!(m.validate().is_err());

        let mut m = sample();
        m.weights.0[PropertyDamage] = 2.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn generic_over_f32() {
        let m: RiskModel<f32> = sample().cast();
        let one: Portfolio = [1u32].into_iter().collect();
        let p = m.event_probability("flood", &one).unwrap();
        assert!((p - 0.40905f32).abs() < 1e-6);
    }
}
