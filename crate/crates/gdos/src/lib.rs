//! Command-line companion of `gdos-core`: Matrix Market input, CSV and
//! JSON output, and sample-parallel drivers for the estimators.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod error;
pub mod mtx;
pub mod output;
pub mod parallel;

pub use commands::{run, Command, Estimator, Report, RunConfig};
pub use error::{CliError, Result};
