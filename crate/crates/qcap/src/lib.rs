//! Command-line front end for `qcap-core`: JSON documents for channels,
//! states and Gaussian parameters, and deterministic reports.

pub mod cli;
pub mod error;
pub mod format;
pub mod report;

pub use error::CliError;
