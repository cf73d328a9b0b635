//! Command-line front end for `attn-core`: solving for optimal attention
//! outcomes, checking incentive compatibility of policy files, sweeping the
//! cost parameter and cross-checking the closed form.

// negated comparisons are deliberate: NaN must fail every range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use commands::{execute, Output, Status};
pub use config::RunConfig;
pub use error::CliError;
