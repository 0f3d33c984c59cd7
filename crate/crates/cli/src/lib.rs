//! Scenario runner: reads JSON scenario files, runs the named check and
//! produces a report whose verdict drives the process exit status.

pub mod error;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::CliError;
pub use report::{Report, SuiteReport, Verdict};
pub use runner::{run_file, run_scenario, run_suite, Overrides};
pub use scenario::{schema, Kind, Scenario};
