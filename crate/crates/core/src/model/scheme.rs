use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Priority letter grade assigned to a mitigation project.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    A,
    B,
    C,
    D,
}

impl Grade {
    pub const ALL: [Grade; 4] = [Grade::A, Grade::B, Grade::C, Grade::D];
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Grade::A => "A",
            Grade::B => "B",
            Grade::C => "C",
            Grade::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Grade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Grade::A),
            "B" | "b" => Ok(Grade::B),
            "C" | "c" => Ok(Grade::C),
            "D" | "d" => Ok(Grade::D),
            other => Err(Error::Parse(format!("unknown grade `{other}`"))),
        }
    }
}

/// One factor per letter grade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradeTable<T> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
    #[serde(rename = "C")]
    pub c: T,
    #[serde(rename = "D")]
    pub d: T,
}

impl<T: Copy> GradeTable<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        GradeTable { a, b, c, d }
    }

    fn values(&self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl<T> Index<Grade> for GradeTable<T> {
    type Output = T;

    fn index(&self, grade: Grade) -> &T {
        match grade {
            Grade::A => &self.a,
            Grade::B => &self.b,
            Grade::C => &self.c,
            Grade::D => &self.d,
        }
    }
}

/// Translation of letter grades into attenuation factors.
///
/// `grade_alpha` multiplies a hazard's probability, `grade_beta` multiplies a
/// covered consequence. With `halve_all_hazard_beta`, projects flagged as
/// all-hazard get `1 - (1 - beta) / 2` instead of `beta`; alpha is never
/// adjusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EffectivenessScheme<T> {
    pub grade_alpha: GradeTable<T>,
    pub grade_beta: GradeTable<T>,
    #[serde(default = "enabled")]
    pub halve_all_hazard_beta: bool,
}

fn enabled() -> bool {
    true
}

impl<T: Scalar> EffectivenessScheme<T> {
    /// Grade table used for the base case: A (0.90, 0.80) through D (0.975, 0.95).
    pub fn base() -> Self {
        EffectivenessScheme {
            grade_alpha: GradeTable::new(T::of(0.90), T::of(0.925), T::of(0.95), T::of(0.975)),
            grade_beta: GradeTable::new(T::of(0.80), T::of(0.85), T::of(0.90), T::of(0.95)),
            halve_all_hazard_beta: true,
        }
    }

    /// Every grade has factor 1: projects have no effect.
    pub fn inert() -> Self {
        EffectivenessScheme {
            grade_alpha: GradeTable::new(T::one(), T::one(), T::one(), T::one()),
            grade_beta: GradeTable::new(T::one(), T::one(), T::one(), T::one()),
            halve_all_hazard_beta: true,
        }
    }

    pub fn alpha(&self, grade: Grade) -> T {
        self.grade_alpha[grade]
    }

    /// Consequence factor for `grade`, after the all-hazard adjustment.
    pub fn beta(&self, grade: Grade, all_hazard: bool) -> T {
        let beta = self.grade_beta[grade];
        if all_hazard && self.halve_all_hazard_beta {
            T::one() - (T::one() - beta) / T::of(2.0)
        } else {
            beta
        }
    }

    /// Factors lie in (0, 1] and are ordered A <= B <= C <= D.
    pub fn validate(&self, path: &str) -> Result<()> {
        for (name, table) in [("grade_alpha", &self.grade_alpha), ("grade_beta", &self.grade_beta)] {
            let values = table.values();
            for (grade, v) in Grade::ALL.iter().zip(values) {
                if !(v > T::zero() && v <= T::one()) {
                    return Err(Error::validation(
                        format!("{path}/{name}/{grade}"),
                        format!("factor {v} outside (0, 1]"),
                    ));
                }
            }
            for (pair, grades) in values.windows(2).zip(Grade::ALL.windows(2)) {
                if pair[0] > pair[1] {
                    return Err(Error::validation(
                        format!("{path}/{name}"),
                        format!("grade {} factor exceeds grade {} factor", grades[0], grades[1]),
                    ));
                }
            }
        }
        Ok(())
    }

    /// True when every factor is at least the corresponding factor of `other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        Grade::ALL.iter().all(|&g| {
            self.grade_alpha[g] >= other.grade_alpha[g] && self.grade_beta[g] >= other.grade_beta[g]
        }) && (self.halve_all_hazard_beta || !other.halve_all_hazard_beta)
    }

    pub fn cast<U: Scalar>(&self) -> EffectivenessScheme<U> {
        let conv = |t: &GradeTable<T>| {
            GradeTable::new(
                U::of(t.a.to_f64_lossy()),
                U::of(t.b.to_f64_lossy()),
                U::of(t.c.to_f64_lossy()),
                U::of(t.d.to_f64_lossy()),
            )
        };
        EffectivenessScheme {
            grade_alpha: conv(&self.grade_alpha),
            grade_beta: conv(&self.grade_beta),
            halve_all_hazard_beta: self.halve_all_hazard_beta,
        }
    }
}
