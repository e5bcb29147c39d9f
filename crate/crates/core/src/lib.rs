//! Semidefinite-programming toolkit for the noncommutative arithmetic-geometric
//! mean inequalities.
//!
//! The pipeline compiles `λ ± Σ_{distinct} X_{j1}⋯X_{jm}` into a sum-of-squares
//! program over the constraints `X_i ⪰ 0`, `n - ΣX_i ⪰ 0`, solves it with an
//! embedded primal-dual interior-point method, and checks certificates:
//! sum-of-squares identities in exact rational arithmetic and Farkas
//! infeasibility rays numerically.

pub mod certify;
pub mod cli;
pub mod error;
pub mod ncpoly;
pub mod sdp;
pub mod sos;

pub use error::{Error, Result};
