//! Mixed-state time-dependent variational principle under Lindblad dynamics.
//!
//! The crate is `no_std` with `alloc` and contains no IO. Its layers:
//!
//! - [`fock`]: dense Jordan-Wigner oracle, exact Lindblad integration, ground
//!   states and distances.
//! - [`majorana`] and [`model`]: symbolic Majorana polynomials and Lindblad
//!   generators built from them.
//! - [`pfaffian`] and [`gaussian`]: covariance-matrix description of fermionic
//!   Gaussian states (Wick expectations, standard form, reconstruction).
//! - [`metrics`]: the monotone α-metric superoperators and their convex
//!   combinations.
//! - [`tdvp`]: the projected flow on an arbitrary manifold chart.
//! - [`gaussified`]: polynomially scaling covariance evolution by Wick
//!   contraction.
//! - [`hubbard`]: the spinful Hubbard chain with spin decoherence and its
//!   diagnostics.
//! - [`random`]: seeded random states, channels and generators.
//! - [`ode`]: fixed-step RK4 and sampled trajectories.
#![no_std]
// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod gaussified;
pub mod hubbard;
pub mod linalg;
pub mod majorana;
pub mod metrics;
pub mod model;
pub mod ode;
pub mod pfaffian;
pub mod random;
pub mod tdvp;

pub use error::{Error, Result};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
