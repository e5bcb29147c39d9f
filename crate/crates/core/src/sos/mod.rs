//! Compilation of the AM-GM Loewner bounds into sum-of-squares programs.

mod assemble;
mod basis;
mod pipeline;
mod symmetry;

pub use assemble::{assemble_sdp, basis_degree};
pub use basis::{constraint_polynomial, localizing_entry, MonomialBasis};
pub use symmetry::{symmetry_reduce, ReducedProblem, SymmetryOrbits};
pub use pipeline::{refute_lambda, solve_bound, BoundSolve};
