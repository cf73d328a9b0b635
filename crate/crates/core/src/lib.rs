//! Incentive-compatible information policies and optimal attention management
//! when the principal and agent have quadratic payoffs and the agent pays a
//! quadratic cost for attention.
//!
//! Works on finite state spaces; the closed-form solver and its search
//! cross-check are specific to the states `{-1, 0, 1}`.
#![no_std]
// negated comparisons are deliberate: NaN must fail every range check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod ic;
pub mod lp;
pub mod optimal3;
pub mod oracle;
pub mod policy;
pub mod quadratic;
pub mod search;
pub mod simplex;

pub use error::{Error, Result};
pub use policy::InformationPolicy;
pub use quadratic::QuadraticModel;
pub use simplex::{AzPoint, Belief, StateSpace};
