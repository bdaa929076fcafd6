//! File formats, run configuration and command implementations for the
//! `nppt` command-line tool. The numerics live in `nppt-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use config::RunConfig;
pub use error::{CliError, Result};
