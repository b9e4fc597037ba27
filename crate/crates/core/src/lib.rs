//! A desk-scale numerical laboratory for reproducing-kernel Banach space
//! constructions on finite sample sets and finite parameter grids.
//!
//! Every function-space norm is computed as a convex program over explicit
//! feature coordinates, one-layer networks are trained by total-variation
//! regularized risk minimization, and the structural identities between
//! those norms (decomposition against a singular family, sum-space
//! compatibility, kernel duality, inclusion chains, and the reformulation
//! between feature- and hypothesis-space optima) are machine-checked as
//! finite-dimensional equalities by solving both sides with independent
//! code paths.

pub mod activation;
pub mod error;
pub mod learn;
mod linalg;
pub mod oracle;
pub mod rkbs;
pub mod rng;
pub mod solvers;
pub mod spaces;
pub mod suites;

pub use error::{Error, Result};
