//! Reading and writing bundles, event records and reports.

mod bundle;
mod events;
mod report;

pub use bundle::{load_bundle, load_bundle_from, ModelBundle, Provenance, ProvenanceNote, SourceKind, FORMAT_VERSION, IOWA_BUNDLE};
pub use events::{load_event_csv, read_event_csv, ColumnMap};
pub use report::{
    canonical_bytes, model_summary, scenario_summary, write_report, Report, ReportFormat, RequestEcho, SIGNIFICANT_DIGITS,
};

/// The winter-storm event fixture shipped with the crate.
pub const WINTER_STORM_EVENTS: &str = include_str!("../../data/winter_storm_events.csv");
