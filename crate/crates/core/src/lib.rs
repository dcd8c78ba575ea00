//! Popa circle groups on `R^d` and the homomorphisms between them.
//!
//! For a linear functional `rho` on `X = R^d`, the open half-space
//! `G_rho(X) = {x : 1 + rho(x) > 0}` is a group under
//! `x o y = x + y + rho(x) y`. This crate provides:
//!
//! - [`group`]: the group law in `f64` and exact rational arithmetic;
//! - [`radial`]: half-line subgroups, sum witnesses and the abelian
//!   subgroup classifier;
//! - [`scalar_homs`]: the 3x3 table of continuous homomorphisms between
//!   one-dimensional groups (including `(R_+, x)` as the infinite parameter);
//! - [`homs`]: multivariate homomorphism families, a black-box classifier
//!   and the radial index tools;
//! - [`grv`]: numerical kernel limits of general regular variation;
//! - [`apps`]: extreme-value kernels and GEV fitting, Haar measure by
//!   Monte Carlo;
//! - [`suite`]: the acceptance suite, also reachable as `popa selftest`.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

// `!(x <= tol)` is deliberate throughout: NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod cli;
pub mod error;
pub mod group;
pub mod grv;
pub mod homs;
pub mod linalg;
pub mod numerics;
pub mod radial;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod scalar_homs;
pub mod schema;
pub mod suite;

/// Largest supported dimension of `X` and `Y`.
pub const MAX_DIM: usize = 16;

pub use error::{Error, Result};
pub use group::{LinFunc, Point, PopaGroup, RationalGroup, RealGroup};
pub use report::Report;
pub use scalar::{Rational, Scalar};
