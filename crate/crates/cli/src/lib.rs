//! Command-line front end: cloud generation, estimates, audits and the
//! integration benchmark.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod commands;
pub mod error;
pub mod format;
pub mod shard;
pub mod surface;

pub use commands::{run, Cli, Command};
pub use error::{CliError, EXIT_AUDIT, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
