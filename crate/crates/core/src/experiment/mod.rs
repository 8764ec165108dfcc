//! Parameter sweeps, slope fits and self-check suites.

pub mod config;
pub mod fit;
pub mod lowerbound;
pub mod suite;

pub use config::{CdChoice, ExperimentConfig};
pub use fit::{fit_loglog_slope, SlopeFit};
pub use lowerbound::{
    csv_header, csv_record, lowerbound_row, run_lowerbound, AlphaFit, CsvSink, LowerBoundReport, LowerBoundRow,
    LowerBoundSummary, THRESHOLD_TOLERANCE,
};
pub use suite::{
    check_averages, check_beta, check_coverage, check_extension, check_index_bounds, check_oracle, run_suite,
    CheckOutcome, SuiteReport,
};
