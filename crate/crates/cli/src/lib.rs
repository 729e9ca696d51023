//! Command-line experiment runner for dissipative fermionic dynamics.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
