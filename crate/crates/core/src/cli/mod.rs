//! Batch front end: datasets in, versioned reports out.

mod input;
mod report;

use thiserror::Error;

pub use input::{
    parse_anchor, parse_bounds, parse_eps_list, parse_list, parse_norm, Dataset, Overrides,
    DATASET_SCHEMA,
};
pub use report::{
    build_report, render_report_text, render_witness_text, run_report, run_witness, to_json,
    CheckEntry, Report, ReportOptions, SipEntry, WitnessOptions, WitnessReport, REPORT_SCHEMA,
    WITNESS_SCHEMA,
};

/// Process exit status: success.
pub const EXIT_OK: i32 = 0;
/// Process exit status: the input could not be used.
pub const EXIT_INPUT: i32 = 1;
/// Process exit status: an applicable certificate contradicted the data.
pub const EXIT_VIOLATION: i32 = 2;

/// Anything that makes the input unusable. Maps to [`EXIT_INPUT`].
#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Descriptor(String),
    #[error(transparent)]
    Core(#[from] crate::Error),
}
