//! Experiment runner: configuration, the subcommands and their artifacts.

pub mod commands;
pub mod config;
pub mod correlate;
pub mod output;
