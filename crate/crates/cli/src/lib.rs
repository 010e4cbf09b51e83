//! Library side of the `tbdrive` binary: configuration parsing, CSV file
//! formats, report rendering, and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;
