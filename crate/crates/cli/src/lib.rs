//! Command-line front end: orbit computation, identity suites and counting
//! profiles, written as versioned JSON or CSV reports.

pub mod args;
pub mod commands;
pub mod report;
pub mod suites;

pub use args::{parse_complex, Cli, Command};
pub use commands::{run, Outcome};
pub use report::{ReportFile, SCHEMA_VERSION};
