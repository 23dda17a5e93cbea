//! Versioned JSON bundle holding a complete model, its named scenarios and a
//! provenance note for every numeric field.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ConsequenceKind, ConsequenceWeights, EffectivenessScheme, Grade, Hazard, Project, ProjectId, RiskModel};
use crate::scenario::Scenario;

pub const FORMAT_VERSION: u32 = 1;

/// The Iowa dataset shipped with the crate.
pub const IOWA_BUNDLE: &str = include_str!("../../data/iowa.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Taken from a published table.
    Published,
    /// Rebuilt from descriptions; best effort.
    Reconstruction,
    /// Stand-in values, not authoritative.
    Placeholder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceNote {
    pub kind: SourceKind,
    pub note: String,
}

/// Field-path patterns (`/`-separated, `*` matches one segment) mapped to
/// source notes. The most specific matching pattern wins.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Provenance(pub BTreeMap<String, ProvenanceNote>);

impl Provenance {
    pub fn lookup(&self, path: &str) -> Option<&ProvenanceNote> {
        let target: Vec<&str> = path.split('/').collect();
        self.0
            .iter()
            .filter(|(pattern, _)| {
                let segs: Vec<&str> = pattern.split('/').collect();
                segs.len() <= target.len() && segs.iter().zip(&target).all(|(p, t)| *p == "*" || p == t)
            })
            .max_by_key(|(pattern, _)| {
                let segs: Vec<&str> = pattern.split('/').collect();
                (segs.len(), segs.iter().filter(|s| **s != "*").count())
            })
            .map(|(_, note)| note)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    #[serde(default)]
    pub name: String,
    pub hazards: Vec<Hazard<f64>>,
    pub weights: ConsequenceWeights<f64>,
    pub scheme: EffectivenessScheme<f64>,
    pub projects: Vec<Project<f64>>,
    #[serde(default)]
    pub scenarios: Vec<Scenario<f64>>,
    pub provenance: Provenance,
}

impl ModelBundle {
    pub fn from_json(text: &str) -> Result<Self> {
        let probe: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let version = probe.get("format_version").and_then(|v| v.as_u64());
        match version {
            None => return Err(Error::validation("format_version", "missing or not an integer")),
            Some(v) if v != FORMAT_VERSION as u64 => {
                return Err(Error::Version { found: v as u32, supported: FORMAT_VERSION })
            }
            Some(_) => {}
        }
        let bundle: ModelBundle = serde_json::from_value(probe).map_err(|e| Error::Parse(e.to_string()))?;
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn iowa() -> Self {
        Self::from_json(IOWA_BUNDLE).expect("shipped bundle is valid")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// The model with a zero budget; solvers take the budget per request.
    pub fn model(&self) -> RiskModel<f64> {
        RiskModel {
            hazards: self.hazards.clone(),
            weights: self.weights,
            projects: self.projects.clone(),
            scheme: self.scheme,
            budget: 0.0,
        }
    }

    /// Panics on an id outside the bundle; use [`RiskModel::project`] for a
    /// checked lookup.
    pub fn project(&self, id: ProjectId) -> &Project<f64> {
        &self.projects[id.slot()]
    }

    pub fn project_count_by_grade(&self) -> BTreeMap<Grade, usize> {
        let mut out = BTreeMap::new();
        for p in &self.projects {
            *out.entry(p.grade).or_insert(0) += 1;
        }
        out
    }

    pub fn scenario(&self, name: &str) -> Result<&Scenario<f64>> {
        self.scenarios.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownScenario(name.to_owned()))
    }

    pub fn validate(&self) -> Result<()> {
        self.model().validate()?;
        let mut names = std::collections::HashSet::new();
        for s in &self.scenarios {
            if !names.insert(s.name.as_str()) {
                return Err(Error::validation(format!("scenarios/{}", s.name), "duplicate scenario name"));
            }
            s.validate()?;
            crate::scenario::apply_scenario(&self.model(), s)?;
        }
        for path in self.numeric_paths() {
            if self.provenance.lookup(&path).is_none() {
                return Err(Error::validation(path, "numeric field has no provenance note"));
            }
        }
        Ok(())
    }

    /// Every numeric field of the bundle as a provenance path.
    pub fn numeric_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        for h in &self.hazards {
            out.push(format!("hazards/{}/baseline_probability", h.id));
            for kind in ConsequenceKind::ALL {
                out.push(format!("hazards/{}/baseline_consequences/{kind}", h.id));
            }
        }
        for kind in ConsequenceKind::ALL {
            out.push(format!("weights/{kind}"));
        }
        push_scheme_paths(&mut out, "scheme");
        for p in &self.projects {
            out.push(format!("projects/{}/cost", p.id));
        }
        for s in &self.scenarios {
            if s.scheme_override.is_some() {
                push_scheme_paths(&mut out, &format!("scenarios/{}/scheme_override", s.name));
            }
            for o in &s.consequence_override {
                out.push(format!("scenarios/{}/consequence_override/{}/{}", s.name, o.hazard, o.kind));
            }
            if !s.budget_grid.is_empty() {
                out.push(format!("scenarios/{}/budget_grid", s.name));
            }
        }
        out
    }

    /// Projects whose cost or applicability rests on a reconstruction.
    pub fn reconstructed_projects(&self) -> Vec<ProjectId> {
        self.projects
            .iter()
            .filter(|p| {
                [format!("projects/{}/cost", p.id), format!("projects/{}/applicability", p.id)]
                    .iter()
                    .any(|path| self.provenance.lookup(path).is_some_and(|n| n.kind != SourceKind::Published))
            })
            .map(|p| p.id)
            .collect()
    }
}

fn push_scheme_paths(out: &mut Vec<String>, prefix: &str) {
    for table in ["grade_alpha", "grade_beta"] {
        for g in Grade::ALL {
            out.push(format!("{prefix}/{table}/{g}"));
        }
    }
}

pub fn load_bundle(path: impl AsRef<Path>) -> Result<ModelBundle> {
    ModelBundle::from_json(&fs::read_to_string(path)?)
}

pub fn load_bundle_from(mut reader: impl Read) -> Result<ModelBundle> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    ModelBundle::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_bundle_dimensions() {
        let b = ModelBundle::iowa();
        assert_eq!(b.hazards.len(), 16);
        assert_eq!(b.projects.len(), 52);
        assert_eq!(ConsequenceKind::ALL.len(), 6);
        let all_hazard: Vec<u32> = b.projects.iter().filter(|p| p.all_hazard).map(|p| p.id.0).collect();
        assert_eq!(all_hazard, vec![10, 41, 47, 48]);
    }

    #[test]
    fn rejects_probability_above_one() {
        let mut v: serde_json::Value = serde_json::from_str(IOWA_BUNDLE).unwrap();
        v["hazards"][2]["baseline_probability"] = serde_json::json!(1.2);
        let err = ModelBundle::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
        assert!(err.to_string().contains("flood"), "{err}");
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let mut v: serde_json::Value = serde_json::from_str(IOWA_BUNDLE).unwrap();
        v["format_version"] = serde_json::json!(7);
        assert!(matches!(ModelBundle::from_json(&v.to_string()), Err(Error::Version { found: 7, .. })));
        assert!(matches!(ModelBundle::from_json("{not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn unannotated_numeric_field_fails_validation() {
        let mut b = ModelBundle::iowa();
        b.provenance.0.retain(|k, _| !k.starts_with("weights"));
        let err = b.validate().unwrap_err();
        assert!(err.to_string().contains("weights/"), "{err}");
    }

    #[test]
    fn provenance_prefers_specific_patterns() {
        let b = ModelBundle::iowa();
        let n28 = b.provenance.lookup("projects/28/cost").unwrap();
        let n27 = b.provenance.lookup("projects/27/cost").unwrap();
        assert_ne!(n28, n27);
        assert_eq!(n27.kind, SourceKind::Published);
        assert_eq!(b.provenance.lookup("projects/5/applicability").unwrap().kind, SourceKind::Reconstruction);
        assert!(b.reconstructed_projects().contains(&ProjectId(28)));
    }

    #[test]
    fn save_then_load_is_identity() {
        let b = ModelBundle::iowa();
        let dir = std::env::temp_dir().join(format!("hazalloc-bundle-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("copy.json");
        b.save(&path).unwrap();
        assert_eq!(load_bundle(&path).unwrap(), b);
        fs::remove_dir_all(&dir).ok();
    }
}
