//! Hazard parameters from raw incident records: cleaning, severity
//! filtering, annual rates, mean consequences and log-log scaling.

use std::collections::{BTreeMap, HashSet};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ConsequenceKind, Consequences, Hazard};
use crate::scalar::Scalar;

/// One incident as read from an event file. `None` marks an empty cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEvent {
    pub event_type: String,
    pub date: NaiveDate,
    pub fatalities: Option<u32>,
    pub injuries: Option<u32>,
    pub property_damage: Option<f64>,
    pub crop_damage: Option<f64>,
}

impl RawEvent {
    pub fn is_complete(&self) -> bool {
        self.fatalities.is_some() && self.injuries.is_some() && self.property_damage.is_some() && self.crop_damage.is_some()
    }

    /// Kinds whose cell was empty.
    pub fn missing(&self) -> Vec<ConsequenceKind> {
        let mut out = Vec::new();
        if self.fatalities.is_none() {
            out.push(ConsequenceKind::Fatalities);
        }
        if self.injuries.is_none() {
            out.push(ConsequenceKind::Injuries);
        }
        if self.property_damage.is_none() {
            out.push(ConsequenceKind::PropertyDamage);
        }
        if self.crop_damage.is_none() {
            out.push(ConsequenceKind::CropDamage);
        }
        out
    }

    fn key(&self) -> (String, NaiveDate, Option<u32>, Option<u32>, Option<u64>, Option<u64>) {
        (
            self.event_type.clone(),
            self.date,
            self.fatalities,
            self.injuries,
            self.property_damage.map(f64::to_bits),
            self.crop_damage.map(f64::to_bits),
        )
    }
}

/// Any-of thresholds. Casualty thresholds are strict ("exceeds"), dollar
/// thresholds inclusive ("at least").
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityCriteria {
    pub min_injuries_exclusive: u32,
    pub min_deaths_exclusive: u32,
    pub min_property_damage_inclusive: f64,
    pub min_crop_damage_inclusive: f64,
}

impl Default for SeverityCriteria {
    fn default() -> Self {
        SeverityCriteria {
            min_injuries_exclusive: 5,
            min_deaths_exclusive: 5,
            min_property_damage_inclusive: 1e8,
            min_crop_damage_inclusive: 5e7,
        }
    }
}

impl SeverityCriteria {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("min_property_damage_inclusive", self.min_property_damage_inclusive),
            ("min_crop_damage_inclusive", self.min_crop_damage_inclusive),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(name, format!("threshold {v} must be a non-negative number")));
            }
        }
        Ok(())
    }

    pub fn is_severe(&self, e: &RawEvent) -> bool {
        e.injuries.is_some_and(|n| n > self.min_injuries_exclusive)
            || e.fatalities.is_some_and(|n| n > self.min_deaths_exclusive)
            || e.property_damage.is_some_and(|d| d >= self.min_property_damage_inclusive)
            || e.crop_damage.is_some_and(|d| d >= self.min_crop_damage_inclusive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardEstimate {
    pub qualifying_events: usize,
    pub span_years: f64,
    pub annual_probability: f64,
    pub mean_consequences: BTreeMap<ConsequenceKind, f64>,
}

impl HazardEstimate {
    /// A hazard entry for a model bundle. Rates above 1 are clamped to 1;
    /// consequences the event file does not record are left at zero.
    pub fn to_hazard(&self, id: impl Into<String>, name: impl Into<String>) -> Hazard<f64> {
        let id = id.into();
        let mut consequences = Consequences::splat(0.0);
        for (&kind, &v) in &self.mean_consequences {
            consequences[kind] = v;
        }
        Hazard {
            baseline_probability: clamp_probability(&id, self.annual_probability),
            id,
            name: name.into(),
            baseline_consequences: consequences,
        }
    }
}

/// Drops events dated before `cutoff_year`, events with an empty
/// consequence cell, and exact duplicates (first occurrence kept).
pub fn clean_events(raw: &[RawEvent], cutoff_year: i32) -> Vec<RawEvent> {
    let mut seen = HashSet::new();
    raw.iter()
        .filter(|e| e.date.year() >= cutoff_year && e.is_complete())
        .filter(|e| seen.insert(e.key()))
        .cloned()
        .collect()
}

pub fn filter_severe(events: &[RawEvent], criteria: &SeverityCriteria) -> Vec<RawEvent> {
    events.iter().filter(|e| criteria.is_severe(e)).cloned().collect()
}

/// Qualifying events per year. Not clamped: rates above 1 are returned as is.
pub fn estimate_rate<T: Scalar>(qualifying_count: usize, span_years: T) -> Result<T> {
    if !(span_years > T::zero()) || !span_years.is_finite() {
        return Err(Error::Domain(format!("span of {span_years} years must be positive")));
    }
    Ok(T::of(qualifying_count as f64) / span_years)
}

/// Per-field arithmetic mean over the four recorded consequences.
/// Empty cells count as zero; clean the events first to drop them.
pub fn mean_consequences(events: &[RawEvent]) -> Result<BTreeMap<ConsequenceKind, f64>> {
    if events.is_empty() {
        return Err(Error::Domain("mean of an empty event list".into()));
    }
    let n = events.len() as f64;
    let mean = |f: &dyn Fn(&RawEvent) -> f64| events.iter().map(f).sum::<f64>() / n;
    Ok(BTreeMap::from([
        (ConsequenceKind::Fatalities, mean(&|e| e.fatalities.unwrap_or(0) as f64)),
        (ConsequenceKind::Injuries, mean(&|e| e.injuries.unwrap_or(0) as f64)),
        (ConsequenceKind::PropertyDamage, mean(&|e| e.property_damage.unwrap_or(0.0))),
        (ConsequenceKind::CropDamage, mean(&|e| e.crop_damage.unwrap_or(0.0))),
    ]))
}

/// National rate times the state's share, e.g. of dams.
pub fn scaled_rate<T: Scalar>(national_annual_rate: T, state_share: T) -> T {
    national_annual_rate * state_share
}

/// Clean, filter, then compute the rate and mean consequences.
pub fn estimate_hazard(
    events: &[RawEvent],
    cutoff_year: i32,
    criteria: &SeverityCriteria,
    span_years: f64,
) -> Result<HazardEstimate> {
    criteria.validate()?;
    let severe = filter_severe(&clean_events(events, cutoff_year), criteria);
    Ok(HazardEstimate {
        qualifying_events: severe.len(),
        span_years,
        annual_probability: estimate_rate(severe.len(), span_years)?,
        mean_consequences: mean_consequences(&severe)?,
    })
}

/// Rates are used as annual probabilities; anything above 1 is capped.
pub fn clamp_probability(hazard: &str, rate: f64) -> f64 {
    if rate > 1.0 {
        log::warn!("{hazard}: annual rate {rate:.4} exceeds 1, clamped to 1");
        1.0
    } else {
        rate
    }
}

/// `log(1 + observed) = intercept + slope * log(1 + reference)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LogLogScaler<T> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> LogLogScaler<T> {
    pub fn identity() -> Self {
        LogLogScaler { slope: T::one(), intercept: T::zero() }
    }
}

/// Ordinary least squares on `(ln(1 + reference), ln(1 + observed))`.
pub fn fit_loglog_scaler<T: Scalar>(pairs: &[(T, T)]) -> Result<LogLogScaler<T>> {
    if pairs.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 pairs, got {}", pairs.len())));
    }
    if let Some((r, o)) = pairs.iter().find(|(r, o)| !(*r >= T::zero() && *o >= T::zero()) || !(r.is_finite() && o.is_finite())) {
        return Err(Error::Fit(format!("pair ({r}, {o}) is not a pair of non-negative numbers")));
    }
    let xs: Vec<T> = pairs.iter().map(|(r, _)| r.ln_1p()).collect();
    let ys: Vec<T> = pairs.iter().map(|(_, o)| o.ln_1p()).collect();
    let n = T::of(pairs.len() as f64);
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    if !(sxx > T::rel_tol() * mx.abs().max(T::one())) {
        return Err(Error::Fit("reference values are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok(LogLogScaler { slope, intercept: my - slope * mx })
}

/// `exp(intercept + slope * ln(1 + reference)) - 1`, never below zero.
pub fn apply_scaler<T: Scalar>(scaler: &LogLogScaler<T>, reference: T) -> T {
    (scaler.intercept + scaler.slope * reference.ln_1p()).exp_m1().max(T::zero())
}
