//! Verification suites and report plumbing behind the `hardy` command.

pub mod config;
pub mod input;
pub mod report;
pub mod suites;

pub use config::RunConfig;
pub use report::{Case, Report, Status};
pub use suites::{run_suite, SUITES};
