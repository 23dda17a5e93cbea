use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::RawEvent;

/// Header name in the event file for each field of [`RawEvent`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub event_type: String,
    pub date: String,
    pub fatalities: String,
    pub injuries: String,
    pub property_damage: String,
    pub crop_damage: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            event_type: "event_type".into(),
            date: "date".into(),
            fatalities: "fatalities".into(),
            injuries: "injuries".into(),
            property_damage: "property_damage".into(),
            crop_damage: "crop_damage".into(),
        }
    }
}

impl ColumnMap {
    /// Headers of the NOAA Storm Events details export, with damages
    /// already converted to plain dollars.
    pub fn storm_events() -> Self {
        ColumnMap {
            event_type: "EVENT_TYPE".into(),
            date: "BEGIN_DATE".into(),
            fatalities: "DEATHS_DIRECT".into(),
            injuries: "INJURIES_DIRECT".into(),
            property_damage: "DAMAGE_PROPERTY".into(),
            crop_damage: "DAMAGE_CROPS".into(),
        }
    }
}

pub fn load_event_csv(path: impl AsRef<Path>, columns: &ColumnMap) -> Result<Vec<RawEvent>> {
    read_event_csv(File::open(path)?, columns)
}

/// Parses comma-separated events with a header row. Empty count or damage
/// cells become `None`; `row` in errors is the 1-based line number.
pub fn read_event_csv(reader: impl Read, columns: &ColumnMap) -> Result<Vec<RawEvent>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::Schema(name.to_owned()));
    let idx = [
        find(&columns.event_type)?,
        find(&columns.date)?,
        find(&columns.fatalities)?,
        find(&columns.injuries)?,
        find(&columns.property_damage)?,
        find(&columns.crop_damage)?,
    ];
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Record { row, column: String::new(), message: e.to_string() })?;
        let cell = |k: usize| record.get(idx[k]).unwrap_or("");
        let fail = |column: &str, message: String| Error::Record { row, column: column.to_owned(), message };
        out.push(RawEvent {
            event_type: cell(0).to_owned(),
            date: parse_date(cell(1)).map_err(|m| fail(&columns.date, m))?,
            fatalities: parse_count(cell(2)).map_err(|m| fail(&columns.fatalities, m))?,
            injuries: parse_count(cell(3)).map_err(|m| fail(&columns.injuries, m))?,
            property_damage: parse_dollars(cell(4)).map_err(|m| fail(&columns.property_damage, m))?,
            crop_damage: parse_dollars(cell(5)).map_err(|m| fail(&columns.crop_damage, m))?,
        });
    }
    Ok(out)
}

fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%m/%d/%Y"))
        .map_err(|_| format!("`{s}` is not a date (expected YYYY-MM-DD or MM/DD/YYYY)"))
}

fn parse_count(s: &str) -> std::result::Result<Option<u32>, String> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| format!("`{s}` is not a non-negative whole number"))
}

fn parse_dollars(s: &str) -> std::result::Result<Option<f64>, String> {
    if s.is_empty() {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(Some(v)),
        _ => Err(format!("`{s}` is not a plain non-negative dollar amount")),
    }
}
