//! Verification harness: configuration, checks, convergence sweeps, reports, CLI.

pub mod checks;
pub mod config;
pub mod convergence;
pub mod cli;
pub mod report;

pub use cli::cli_main;
