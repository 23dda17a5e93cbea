use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::consequence::ConsequenceKind;
use super::scheme::Grade;
use crate::scalar::Scalar;

/// Project identifier, contiguous from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectId(pub u32);

impl ProjectId {
    /// Position in the model's project list.
    pub fn slot(self) -> usize {
        (self.0 as usize).wrapping_sub(1)
    }
}

impl fmt::Display for ProjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for ProjectId {
    fn from(v: u32) -> Self {
        ProjectId(v)
    }
}

/// How a project acts on one hazard.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applicability {
    pub hazard: String,
    #[serde(default)]
    pub reduces_probability: bool,
    #[serde(default)]
    pub reduced_consequences: BTreeSet<ConsequenceKind>,
}

impl Applicability {
    pub fn new(
        hazard: impl Into<String>,
        reduces_probability: bool,
        reduced_consequences: impl IntoIterator<Item = ConsequenceKind>,
    ) -> Self {
        Applicability {
            hazard: hazard.into(),
            reduces_probability,
            reduced_consequences: reduced_consequences.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Project<T> {
    pub id: ProjectId,
    pub name: String,
    pub cost: T,
    pub grade: Grade,
    #[serde(default)]
    pub all_hazard: bool,
    pub applicability: Vec<Applicability>,
}

impl<T: Scalar> Project<T> {
    pub fn applies_to(&self, hazard_id: &str) -> Option<&Applicability> {
        self.applicability.iter().find(|a| a.hazard == hazard_id)
    }

    pub fn cast<U: Scalar>(&self) -> Project<U> {
        Project {
            id: self.id,
            name: self.name.clone(),
            cost: U::of(self.cost.to_f64_lossy()),
            grade: self.grade,
            all_hazard: self.all_hazard,
            applicability: self.applicability.clone(),
        }
    }
}
