//! Verification harness: manufactured-solution convergence studies,
//! property suites for the discrete potential theory, and machine-readable
//! reports.

mod config;
mod convergence;
mod report;
mod suites;

pub use config::StudyConfig;
pub use convergence::run_convergence;
pub use report::{CheckResult, ConvergenceRow, Report, ReportFormat};
pub use suites::{geometry_summary, run_property_suite, SUITE_NAMES};
