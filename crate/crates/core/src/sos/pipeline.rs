use super::assemble::assemble_sdp;
use super::symmetry::symmetry_reduce;
use crate::error::Result;
use crate::sdp::{
    extract_farkas, farkas_combination, farkas_margin, farkas_scale, max_eigenvalue, solve,
    FarkasCertificate, SdpProblem, Sign, Solution, SolverOptions, MIN_MARGIN,
};

/// Outcome of solving one λ-problem.
#[derive(Clone, Debug)]
pub struct BoundSolve {
    /// The full (unreduced) problem.
    pub problem: SdpProblem,
    /// Solution of the full problem, lifted when the reduction was used.
    pub solution: Solution,
    /// Free orbit variables, when the reduction was used.
    pub free_variables: Option<usize>,
    /// Constraint count of the problem actually handed to the solver.
    pub solved_constraints: usize,
}

impl BoundSolve {
    pub fn lambda(&self) -> f64 {
        self.solution.objective_primal
    }
}

/// Compiles and solves the λ-problem for `(m, n, sign)`.
pub fn solve_bound(
    m: usize,
    n: usize,
    sign: Sign,
    symmetry: bool,
    options: &SolverOptions,
) -> Result<BoundSolve> {
    let problem = assemble_sdp(m, n, sign)?;
    if !symmetry {
        let solution = solve(&problem, options)?;
        return Ok(BoundSolve {
            solved_constraints: problem.num_constraints(),
            problem,
            solution,
            free_variables: None,
        });
    }
    let reduced = symmetry_reduce(&problem)?;
    let sol = solve(&reduced.problem, options)?;
    let solution = reduced.lift_solution(&problem, &sol);
    Ok(BoundSolve {
        solved_constraints: reduced.problem.num_constraints(),
        free_variables: Some(reduced.orbits.num_free_variables()),
        problem,
        solution,
    })
}

/// Searches for a Farkas certificate refuting `λ = lambda_target` for the
/// full λ-problem of `(m, n, sign)`. The search runs on the reduced problem
/// when `symmetry` is set and the certificate is lifted to the full one.
pub fn refute_lambda(
    m: usize,
    n: usize,
    sign: Sign,
    lambda_target: f64,
    symmetry: bool,
    options: &SolverOptions,
    psd_tolerance: f64,
) -> Result<(SdpProblem, Option<FarkasCertificate>)> {
    let problem = assemble_sdp(m, n, sign)?;
    if !symmetry {
        let cert = extract_farkas(&problem, lambda_target, options, psd_tolerance)?;
        return Ok((problem, cert));
    }
    let reduced = symmetry_reduce(&problem)?;
    let cert = extract_farkas(&reduced.problem, lambda_target, options, psd_tolerance)?;
    let Some(cert) = cert else {
        return Ok((problem, None));
    };
    // margin and PSD defect are recomputed on the full data
    let mut lifted = reduced.lift_farkas(&cert);
    lifted.margin = farkas_margin(&problem, lambda_target, &lifted.y);
    lifted.psd_defect = max_eigenvalue(&farkas_combination(&problem, &lifted.y)?);
    let valid = lifted.margin > MIN_MARGIN
        && lifted.psd_defect <= psd_tolerance * farkas_scale(&problem, &lifted.y);
    Ok((problem, valid.then_some(lifted)))
}
