//! Command-line front end for `crown-core`: argument parsing, a parallel
//! deterministic runner, and JSON/CSV report output.

pub mod cli;
pub mod output;
pub mod parse;
pub mod runner;

pub use cli::{execute, run, Execution};
