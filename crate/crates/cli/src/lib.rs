//! Command-line front end: config parsing, subcommands and CSV output.

pub mod commands;
pub mod config;
pub mod oracle_check;
pub mod output;
