//! Command-line front end: workspace documents, suites of checks and
//! reproducible reports.

pub mod checks;
pub mod commands;
pub mod config;
pub mod matrix_file;
pub mod report;
