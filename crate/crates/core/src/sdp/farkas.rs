use nalgebra::{DMatrix, SymmetricEigen};

use super::problem::{Block, Constraint, SdpProblem, SparseSymMatrix, SymEntry};
use super::solver::{solve, SolverOptions};
use crate::error::{Error, Result};

/// Margin below which no certificate is reported.
pub const MIN_MARGIN: f64 = 1e-6;

/// Dual ray proving that no `Y ⪰ 0` satisfies the constraints of a
/// λ-problem together with the pin `⟨C₀, Y⟩ = lambda_target`.
///
/// `y[0]` multiplies the pinned constraint and `y[1 + i]` constraint `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasCertificate {
    pub lambda_target: f64,
    pub y: Vec<f64>,
    /// `lambda_target · y[0] + bᵀ y[1..]`.
    pub margin: f64,
    /// Largest eigenvalue of `y[0]·C₀ + Σ y[1 + i]·A_i`.
    pub psd_defect: f64,
}

/// `y[0]·C₀ + Σ y[1 + i]·A_i` as dense blocks.
pub fn farkas_combination(problem: &SdpProblem, y: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    if y.len() != problem.num_constraints() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "certificate has {} multipliers, pinned problem has {} constraints",
            y.len(),
            problem.num_constraints() + 1
        )));
    }
    let mut s = problem.objective.to_dense_blocks(&problem.blocks);
    for m in s.iter_mut() {
        *m *= y[0];
    }
    for (c, &yi) in problem.constraints.iter().zip(&y[1..]) {
        if yi != 0.0 {
            c.matrix.axpy_into(yi, &mut s);
        }
    }
    Ok(s)
}

/// Largest eigenvalue over all blocks.
pub fn max_eigenvalue(blocks: &[DMatrix<f64>]) -> f64 {
    blocks
        .iter()
        .map(|b| {
            let sym = (b + b.transpose()) * 0.5;
            SymmetricEigen::new(sym).eigenvalues.max()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `lambda_target · y[0] + bᵀ y[1..]`.
pub fn farkas_margin(problem: &SdpProblem, lambda_target: f64, y: &[f64]) -> f64 {
    lambda_target * y[0]
        + problem
            .constraints
            .iter()
            .zip(&y[1..])
            .map(|(c, yi)| c.rhs * yi)
            .sum::<f64>()
}

/// Searches for a Farkas ray refuting `⟨C₀, Y⟩ = lambda_target`.
///
/// Solves the elastic problem
///
/// ```text
/// min t  s.t.  ⟨Ã_i, X⟩ - t·tr(Ã_i) = b̃_i,  X ⪰ 0,  t >= 0
/// ```
///
/// where `Ã`, `b̃` are the constraints with the pin prepended and
/// `Y = X - tI`. Its dual maximizes `b̃ᵀy` over `Σ y_i Ã_i ⪯ 0`,
/// `tr(-Σ y_i Ã_i) <= 1`, so an optimal `t* > 0` comes with a ray of margin
/// `t*`. Returns `None` when the margin does not exceed [`MIN_MARGIN`] or
/// the ray fails the PSD check at `psd_tolerance`.
pub fn extract_farkas(
    problem: &SdpProblem,
    lambda_target: f64,
    options: &SolverOptions,
    psd_tolerance: f64,
) -> Result<Option<FarkasCertificate>> {
    problem.validate()?;
    let t_block = problem.blocks.len();
    let elastic_row = |m: &SparseSymMatrix| {
        let trace: f64 = m
            .entries()
            .iter()
            .filter(|e| e.row == e.col)
            .map(|e| e.value)
            .sum();
        let mut entries = m.entries().to_vec();
        entries.push(SymEntry {
            block: t_block,
            row: 0,
            col: 0,
            value: -trace,
        });
        SparseSymMatrix::from_entries(entries)
    };
    let mut constraints = vec![Constraint {
        matrix: elastic_row(&problem.objective),
        rhs: lambda_target,
    }];
    constraints.extend(problem.constraints.iter().map(|c| Constraint {
        matrix: elastic_row(&c.matrix),
        rhs: c.rhs,
    }));
    let mut blocks = problem.blocks.clone();
    blocks.push(Block::dense(1));
    let elastic = SdpProblem {
        blocks,
        objective: SparseSymMatrix::from_entries([SymEntry {
            block: t_block,
            row: 0,
            col: 0,
            value: 1.0,
        }]),
        constraints,
        meta: None,
    };
    let sol = solve(&elastic, options)?;
    log::info!(
        "elastic problem: status {}, t = {:e}, iterations {}",
        sol.status,
        sol.objective_primal,
        sol.iterations
    );
    let y = sol.dual;
    let margin = farkas_margin(problem, lambda_target, &y);
    if margin.is_nan() || margin <= MIN_MARGIN {
        return Ok(None);
    }
    let psd_defect = max_eigenvalue(&farkas_combination(problem, &y)?);
    if psd_defect > psd_tolerance * farkas_scale(problem, &y) {
        log::warn!("elastic dual ray has PSD defect {psd_defect:e}; no certificate");
        return Ok(None);
    }
    Ok(Some(FarkasCertificate {
        lambda_target,
        y,
        margin,
        psd_defect,
    }))
}

/// `‖y‖₁ · max_i ‖C_i‖_∞` over the pinned problem's data.
pub fn farkas_scale(problem: &SdpProblem, y: &[f64]) -> f64 {
    let l1: f64 = y.iter().map(|v| v.abs()).sum();
    let cmax = problem
        .constraints
        .iter()
        .map(|c| c.matrix.max_abs())
        .fold(problem.objective.max_abs(), f64::max);
    l1 * cmax
}
