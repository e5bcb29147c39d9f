//! Block-diagonal semidefinite programs: data model, interior-point solver,
//! SDPA I/O, JSON records and Farkas certificate extraction.

mod farkas;
pub mod json;
mod problem;
mod sdpa;
mod solver;

pub use farkas::{
    extract_farkas, farkas_combination, farkas_margin, farkas_scale, max_eigenvalue,
    FarkasCertificate, MIN_MARGIN,
};
pub use problem::{
    zero_blocks, Block, BlockKind, Constraint, ProblemMeta, SdpProblem, Sign, SparseSymMatrix,
    SymEntry,
};
pub use sdpa::{export_sdpa, export_sdpa_string, import_sdpa, import_sdpa_str};
pub use solver::{solve, Solution, SolveStatus, SolverOptions};
