//! Batch driver for the `ffpp` library: sweeps, identity grids and girth
//! scans, written out as JSON or CSV reports.

pub mod args;
pub mod cache;
pub mod commands;
pub mod report;

pub use args::{Cli, Command};
pub use commands::{run, Context};
pub use report::{Row, RunReport, Section, Verdict};
