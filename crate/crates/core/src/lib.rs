//! Numerical laboratory for a degenerate phase-field model of binary fluids.
//!
//! The order parameter obeys a parabolic equation whose diffusivity
//! `ε + φ²` nearly vanishes at the fluid interface. After the change of
//! variable `u = U_ε(φ)` the crate provides
//!
//! * closed-form transforms of ε ([`transform`]),
//! * exact steady states of the `ε → 0` limit equation ([`steady`]),
//! * local travelling waves built by shooting ([`wave`]),
//! * IMEX finite-difference solvers for the regularised and the limit
//!   problems with their a-priori diagnostics ([`pde`]),
//! * interface tracking and velocity diagnostics ([`interface`]),
//! * a scenario runner that writes CSV/JSON results ([`experiments`]).

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod interface;
pub mod ode;
pub mod pde;
pub mod quad;
pub mod steady;
pub mod transform;
pub mod wave;

pub use error::{Error, Result};
