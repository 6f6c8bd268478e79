//! Command-line front end: key and message files, flat reports and the
//! `qcldpc` subcommands.

pub mod commands;
pub mod error;
pub mod files;
pub mod report;
