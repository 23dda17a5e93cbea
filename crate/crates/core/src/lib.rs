//! Selection of risk-mitigation projects under a budget, minimizing expected
//! multi-hazard loss.
//!
//! The core types are generic over the floating point type (see [`Scalar`]);
//! the aliases at the crate root fix it to `f64`, which is what the bundle
//! format, reports and front ends use.

pub mod error;
pub mod estimation;
pub mod io;
pub mod model;
pub mod scalar;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Applicability, ConsequenceKind, Consequences, Grade, GradeTable, Portfolio, ProjectId};
pub use scalar::Scalar;

pub type Hazard = model::Hazard<f64>;
pub type Project = model::Project<f64>;
pub type ConsequenceWeights = model::ConsequenceWeights<f64>;
pub type EffectivenessScheme = model::EffectivenessScheme<f64>;
pub type RiskModel = model::RiskModel<f64>;
pub type SolveRequest = solver::SolveRequest<f64>;
pub type SolveResult = solver::SolveResult<f64>;
pub type SweepPoint = solver::SweepPoint<f64>;
pub type Scenario = scenario::Scenario<f64>;
