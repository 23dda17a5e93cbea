#![allow(dead_code)]

use rand::Rng;

use hazalloc::model::{Applicability, ConsequenceKind, Consequences, Grade, Hazard, Project, ProjectId};
use hazalloc::model::ConsequenceWeights;
use hazalloc::{EffectivenessScheme, RiskModel};

/// Random model: probabilities in [0, 1), sparse consequences, costs in
/// [1, 100], random grades and applicability, a few all-hazard projects.
pub fn random_model<R: Rng>(rng: &mut R, hazards: usize, projects: usize) -> RiskModel {
    let hs: Vec<Hazard<f64>> = (0..hazards)
        .map(|i| {
            let mut c = [0.0; 6];
            for v in &mut c {
                if rng.gen_bool(0.6) {
                    *v = rng.gen_range(0.0..500.0);
                }
            }
            Hazard {
                id: format!("h{i}"),
                name: format!("hazard {i}"),
                baseline_probability: rng.gen_range(0.0..1.0),
                baseline_consequences: Consequences(c),
            }
        })
        .collect();
    let weights = ConsequenceWeights(Consequences([40.0, 4.0, 1.0, 1.0, 0.3, 3.0]));
    let mut ps = Vec::with_capacity(projects);
    for k in 0..projects {
        let all_hazard = rng.gen_bool(0.1);
        let mut applicability = Vec::new();
        for h in &hs {
            if all_hazard || rng.gen_bool(0.35) {
                let mut kinds = Vec::new();
                for kind in ConsequenceKind::ALL {
                    if rng.gen_bool(0.4) {
                        kinds.push(kind);
                    }
                }
                applicability.push(Applicability::new(h.id.clone(), rng.gen_bool(0.4), kinds));
            }
        }
        ps.push(Project {
            id: ProjectId(k as u32 + 1),
            name: format!("p{}", k + 1),
            cost: rng.gen_range(1..=100) as f64,
            grade: Grade::ALL[rng.gen_range(0..4)],
            all_hazard,
            applicability,
        });
    }
    RiskModel::new(hs, weights, ps, EffectivenessScheme::base(), 0.0).expect("generated model is valid")
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
