//! Parameter sweeps, time-switching ratio search, oracle validation and
//! tabular output. These drive the command-line tool.

mod optimize;
mod output;
mod sweep;
mod validate;

pub use optimize::{
    golden_section_max, grid_scan_max, is_unimodal, optimize_alpha, AlphaOptimum, GoldenOutcome,
    ALPHA_SEARCH_RANGE,
};
pub use output::{format_value, write_csv, write_json, CsvRecord, SweepDocument, CSV_HEADER};
pub use sweep::{
    argmax, essr_point, linspace, sweep, sweep_alpha, sweep_distance, sweep_snr, Method, Scenario,
    SweepEntry, SweepRow, SweepSpec, SweepVariable,
};
pub use validate::{validate, Check, CheckStatus, ValidationReport, MIN_VALIDATION_SAMPLES};
