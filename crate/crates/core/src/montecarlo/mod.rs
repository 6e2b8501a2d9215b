//! Monte Carlo bias study over sample sizes, replications and estimators.

pub mod design;
pub mod report;
pub mod study;

pub use design::{parse_design, render_design, EstimatorKind, StudyDesign};
pub use report::{emit_report, parse_report_csv, ReportFormat};
pub use study::{
    aggregate, run_replication, run_study, CellSummary, EstimateOutcome, ReplicationRecord,
    StudyReport,
};
