//! Primal-dual path-following interior-point method with the HKM direction
//! and Mehrotra predictor-corrector steps.
//!
//! Primal: `min ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0`.
//! Dual:   `max bᵀy s.t. Σ y_i A_i + Z = C, Z ⪰ 0`.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, FullPivLU, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::problem::{BlockKind, SdpProblem, SparseSymMatrix};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Bound on relative gap and relative primal/dual residuals.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the PSD boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-8,
            max_iterations: 200,
            step_fraction: 0.95,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// The primal problem has no feasible point.
    Infeasible,
    /// The primal objective is unbounded below.
    Unbounded,
    MaxIterations,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::NumericalFailure => "numerical_failure",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub primal_blocks: Vec<DMatrix<f64>>,
    /// One multiplier per constraint; dropped dependent rows get 0.
    pub dual: Vec<f64>,
    pub dual_slack: Vec<DMatrix<f64>>,
    pub objective_primal: f64,
    pub objective_dual: f64,
    /// `|pobj - dobj| / (1 + |pobj| + |dobj|)`.
    pub gap: f64,
    /// `‖b - A(X)‖ / (1 + ‖b‖)`.
    pub primal_infeasibility: f64,
    /// `‖C - Z - Aᵀy‖ / (1 + ‖C‖)`.
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Constraints removed as duplicates or linearly dependent.
    pub dropped_constraints: Vec<usize>,
}

/// Solves `problem`. Solver trouble is reported through
/// [`Solution::status`]; an `Err` means the input itself is malformed.
pub fn solve(problem: &SdpProblem, options: &SolverOptions) -> Result<Solution> {
    problem.validate()?;
    let pre = presolve(problem);
    let mut state = Ipm::new(problem, &pre);
    let mut status = state.run(options);
    let mut sol = state.into_solution(problem, &pre, status);

    if pre.inconsistent {
        status = SolveStatus::Infeasible;
    } else if status == SolveStatus::Optimal && !pre.dropped.is_empty() {
        // dropped rows must still hold at the final point
        let bnorm = norm(&problem.rhs());
        let worst = pre
            .dropped
            .iter()
            .map(|&i| {
                let c = &problem.constraints[i];
                (c.rhs - c.matrix.inner(&sol.primal_blocks)).abs()
            })
            .fold(0.0, f64::max);
        if worst > 1e3 * options.tolerance * (1.0 + bnorm) {
            log::warn!("dropped constraints violated by {worst:e}");
            status = SolveStatus::Infeasible;
        }
    }
    sol.status = status;
    Ok(sol)
}

struct Presolved {
    /// Original indices of the rows passed to the interior-point method.
    kept: Vec<usize>,
    dropped: Vec<usize>,
    inconsistent: bool,
}

fn presolve(problem: &SdpProblem) -> Presolved {
    let mut seen: HashMap<Vec<(usize, usize, usize, u64)>, usize> = HashMap::new();
    let mut unique = Vec::new();
    let mut dropped = Vec::new();
    let mut inconsistent = false;
    for (i, c) in problem.constraints.iter().enumerate() {
        let key: Vec<_> = c
            .matrix
            .entries()
            .iter()
            .map(|e| (e.block, e.row, e.col, e.value.to_bits()))
            .collect();
        match seen.get(&key) {
            Some(&first) => {
                let b0 = problem.constraints[first].rhs;
                if (b0 - c.rhs).abs() > 1e-12 * (1.0 + b0.abs()) {
                    inconsistent = true;
                }
                dropped.push(i);
            }
            None => {
                seen.insert(key, i);
                unique.push(i);
            }
        }
    }
    for &i in &unique {
        if problem.constraints[i].matrix.is_empty() && problem.constraints[i].rhs != 0.0 {
            inconsistent = true;
        }
    }

    let gram = gram_matrix(problem, &unique);
    let independent = pivoted_cholesky_rank(&gram, unique.len(), 1e-12);
    let mut keep_flag = vec![false; unique.len()];
    for &k in &independent {
        keep_flag[k] = true;
    }
    let mut kept = Vec::new();
    for (k, &i) in unique.iter().enumerate() {
        if keep_flag[k] {
            kept.push(i);
        } else {
            dropped.push(i);
        }
    }
    let dependent = unique.len() - kept.len();
    if dependent > 0 {
        log::warn!("dropped {dependent} linearly dependent constraints");
    }
    dropped.sort_unstable();
    Presolved {
        kept,
        dropped,
        inconsistent,
    }
}

fn gram_matrix(problem: &SdpProblem, rows: &[usize]) -> Vec<f64> {
    let all: Vec<SparseSymMatrix> = rows
        .iter()
        .map(|&i| problem.constraints[i].matrix.clone())
        .collect();
    gram_of(&all, &(0..rows.len()).collect::<Vec<_>>())
}

/// Row-major Gram matrix `⟨A_i, A_j⟩` of the selected matrices.
fn gram_of(mats: &[SparseSymMatrix], rows: &[usize]) -> Vec<f64> {
    let k = rows.len();
    let mut by_coord: HashMap<(usize, usize, usize), Vec<(usize, f64)>> = HashMap::new();
    for (local, &i) in rows.iter().enumerate() {
        for e in mats[i].entries() {
            let w: f64 = if e.row == e.col { 1.0 } else { 2.0 };
            by_coord
                .entry((e.block, e.row, e.col))
                .or_default()
                .push((local, w.sqrt() * e.value));
        }
    }
    let mut g = vec![0.0; k * k];
    for list in by_coord.values() {
        for &(a, va) in list {
            for &(b, vb) in list {
                g[a * k + b] += va * vb;
            }
        }
    }
    g
}

/// Indices of a maximal well-conditioned independent subset, chosen by
/// Cholesky with diagonal pivoting on a row-major Gram matrix.
fn pivoted_cholesky_rank(g: &[f64], k: usize, rel_threshold: f64) -> Vec<usize> {
    let mut a = g.to_vec();
    let mut perm: Vec<usize> = (0..k).collect();
    let max_diag = (0..k).map(|i| a[i * k + i]).fold(0.0, f64::max);
    if max_diag <= 0.0 {
        return Vec::new();
    }
    let threshold = rel_threshold * max_diag;
    let mut rank = 0;
    for j in 0..k {
        let (p, &piv) = (j..k)
            .map(|i| (i, &a[i * k + i]))
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("nonempty range");
        if piv <= threshold {
            break;
        }
        if p != j {
            for c in 0..k {
                a.swap(j * k + c, p * k + c);
            }
            for r in 0..k {
                a.swap(r * k + j, r * k + p);
            }
            perm.swap(j, p);
        }
        let d = a[j * k + j].sqrt();
        a[j * k + j] = d;
        for i in j + 1..k {
            a[i * k + j] /= d;
        }
        for i in j + 1..k {
            let lij = a[i * k + j];
            if lij == 0.0 {
                continue;
            }
            for c in j + 1..=i {
                a[i * k + c] -= lij * a[c * k + j];
            }
        }
        // keep the trailing block symmetric for the next pivot search
        for i in j + 1..k {
            for c in j + 1..i {
                a[c * k + i] = a[i * k + c];
            }
        }
        rank += 1;
    }
    let mut chosen: Vec<usize> = perm[..rank].to_vec();
    chosen.sort_unstable();
    chosen
}

/// `(row, col, value)` entries of one constraint inside one block.
type BlockEntries = Vec<(usize, usize, f64)>;

/// Constraint data restricted to one block, in kept-row numbering.
struct BlockRows {
    rows: Vec<(usize, BlockEntries)>,
}

struct Ipm {
    dims: Vec<usize>,
    diagonal: Vec<bool>,
    c: SparseSymMatrix,
    a: Vec<SparseSymMatrix>,
    b: Vec<f64>,
    by_block: Vec<BlockRows>,
    x: Vec<DMatrix<f64>>,
    z: Vec<DMatrix<f64>>,
    y: Vec<f64>,
    iterations: usize,
}

type Direction = (Vec<DMatrix<f64>>, Vec<f64>, Vec<DMatrix<f64>>);

enum SchurFactor {
    Cholesky(Cholesky<f64, Dyn>),
    Lu(FullPivLU<f64, Dyn, Dyn>),
}

impl SchurFactor {
    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            SchurFactor::Cholesky(c) => Some(c.solve(rhs)),
            SchurFactor::Lu(lu) => lu.solve(rhs),
        }
    }

}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    y: Vec<f64>,
    z: Vec<DMatrix<f64>>,
}

struct Residuals {
    rp: Vec<f64>,
    rd: Vec<DMatrix<f64>>,
    pobj: f64,
    dobj: f64,
    gap: f64,
    pinf: f64,
    dinf: f64,
}

impl Ipm {
    fn new(problem: &SdpProblem, pre: &Presolved) -> Self {
        let dims = problem.block_dims();
        let a: Vec<SparseSymMatrix> = pre
            .kept
            .iter()
            .map(|&i| problem.constraints[i].matrix.clone())
            .collect();
        let b: Vec<f64> = pre.kept.iter().map(|&i| problem.constraints[i].rhs).collect();
        let mut by_block: Vec<BlockRows> = dims.iter().map(|_| BlockRows { rows: Vec::new() }).collect();
        for (i, m) in a.iter().enumerate() {
            for e in m.entries() {
                let rows = &mut by_block[e.block].rows;
                match rows.last_mut() {
                    Some((last, list)) if *last == i => list.push((e.row, e.col, e.value)),
                    _ => rows.push((i, vec![(e.row, e.col, e.value)])),
                }
            }
        }
        let max_b = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let max_a = a
            .iter()
            .chain(std::iter::once(&problem.objective))
            .map(|m| m.frobenius_norm())
            .fold(0.0, f64::max);
        let alpha = 1.0 + max_b + max_a;
        let x: Vec<_> = dims.iter().map(|&d| DMatrix::identity(d, d) * alpha).collect();
        let z = x.clone();
        Ipm {
            diagonal: problem.blocks.iter().map(|b| b.kind == BlockKind::Diagonal).collect(),
            dims,
            c: problem.objective.clone(),
            y: vec![0.0; a.len()],
            a,
            b,
            by_block,
            x,
            z,
            iterations: 0,
        }
    }

    fn residuals(&self) -> Residuals {
        let rp: Vec<f64> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| b - a.inner(&self.x))
            .collect();
        let mut rd = self.c.to_dense_blocks_dims(&self.dims);
        for (k, z) in self.z.iter().enumerate() {
            rd[k] -= z;
        }
        for (a, &yi) in self.a.iter().zip(&self.y) {
            a.axpy_into(-yi, &mut rd);
        }
        let pobj = self.c.inner(&self.x);
        let dobj: f64 = self.b.iter().zip(&self.y).map(|(b, y)| b * y).sum();
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = norm(&rp) / (1.0 + norm(&self.b));
        let dinf = blocks_norm(&rd) / (1.0 + self.c.frobenius_norm());
        Residuals {
            rp,
            rd,
            pobj,
            dobj,
            gap,
            pinf,
            dinf,
        }
    }

    fn run(&mut self, opts: &SolverOptions) -> SolveStatus {
        let mut best: Option<(f64, Iterate)> = None;
        let mut stalls = 0;
        let status = loop {
            let r = self.residuals();
            let err = self.error(&r);
            log::debug!(
                "iter {:3} pobj {:+.10e} dobj {:+.10e} gap {:.2e} pinf {:.2e} dinf {:.2e}",
                self.iterations,
                r.pobj,
                r.dobj,
                r.gap,
                r.pinf,
                r.dinf
            );
            if err <= opts.tolerance {
                return SolveStatus::Optimal;
            }
            if let Some(s) = self.infeasibility(&r, opts.tolerance) {
                return s;
            }
            match &best {
                Some((e, _)) if *e <= err => {
                    // iterates drifting away from an almost optimal point
                    if *e < 1e-5 && err > 1e3 * *e {
                        log::debug!("lack of progress");
                        break SolveStatus::NumericalFailure;
                    }
                }
                _ => best = Some((err, self.snapshot())),
            }
            if self.iterations >= opts.max_iterations {
                break SolveStatus::MaxIterations;
            }
            self.iterations += 1;
            match self.step(&r, opts) {
                Some(step) if step < 1e-10 => {
                    stalls += 1;
                    if stalls >= 3 {
                        break SolveStatus::NumericalFailure;
                    }
                }
                Some(_) => stalls = 0,
                None => break SolveStatus::NumericalFailure,
            }
        };
        if let Some((_, it)) = best {
            self.restore(it);
        }
        self.polish_primal();
        if self.error(&self.residuals()) <= opts.tolerance {
            return SolveStatus::Optimal;
        }
        status
    }

    /// Largest of relative gap, relative complementarity and residuals.
    fn error(&self, r: &Residuals) -> f64 {
        let xz = blocks_dot(&self.x, &self.z);
        let comp = xz / (1.0 + r.pobj.abs() + r.dobj.abs());
        r.gap.max(comp).max(r.pinf).max(r.dinf)
    }

    fn snapshot(&self) -> Iterate {
        Iterate {
            x: self.x.clone(),
            y: self.y.clone(),
            z: self.z.clone(),
        }
    }

    fn restore(&mut self, it: Iterate) {
        self.x = it.x;
        self.y = it.y;
        self.z = it.z;
    }

    /// Removes the primal residual by the least-norm correction
    /// `X += Aᵀ (AAᵀ)⁻¹ r_p` when the result stays positive definite.
    fn polish_primal(&mut self) {
        let m = self.a.len();
        if m == 0 {
            return;
        }
        let rows: Vec<usize> = (0..m).collect();
        let g = gram_of(&self.a, &rows);
        let Some(ch) = Cholesky::new(DMatrix::from_row_slice(m, m, &g)) else {
            return;
        };
        let rp = DVector::from_iterator(
            m,
            self.a.iter().zip(&self.b).map(|(a, b)| b - a.inner(&self.x)),
        );
        let w = ch.solve(&rp);
        let mut x = self.x.clone();
        for (a, &wi) in self.a.iter().zip(w.iter()) {
            a.axpy_into(wi, &mut x);
        }
        if x.iter().all(|b| Cholesky::new(b.clone()).is_some()) {
            self.x = x;
        }
    }

    /// One predictor-corrector iteration; returns the larger step length.
    fn step(&mut self, r: &Residuals, opts: &SolverOptions) -> Option<f64> {
        let total_dim: usize = self.dims.iter().sum();
        let mu = blocks_dot(&self.x, &self.z) / total_dim as f64;
        let zinv = self.z.iter().map(spd_inverse).collect::<Option<Vec<_>>>()?;
        let schur = self.schur_factor(&zinv)?;

        // predictor
        let g_aff: Vec<DMatrix<f64>> = self.x.iter().map(|x| -x).collect();
        let (dx_a, _, dz_a) = self.direction(&schur, &zinv, r, &g_aff)?;
        let ap_a = max_step(&self.x, &dx_a, 1.0)?;
        let ad_a = max_step(&self.z, &dz_a, 1.0)?;
        let mut mu_aff = 0.0;
        for k in 0..self.dims.len() {
            let xa = &self.x[k] + &dx_a[k] * ap_a;
            let za = &self.z[k] + &dz_a[k] * ad_a;
            mu_aff += xa.dot(&za);
        }
        mu_aff /= total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let g: Vec<DMatrix<f64>> = (0..self.dims.len())
            .map(|k| &zinv[k] * (sigma * mu) - &self.x[k] - &dx_a[k] * &dz_a[k] * &zinv[k])
            .collect();
        let (dx, dy, dz) = self.direction(&schur, &zinv, r, &g)?;
        let ap = max_step(&self.x, &dx, opts.step_fraction)?;
        let ad = max_step(&self.z, &dz, opts.step_fraction)?;
        for k in 0..self.dims.len() {
            self.x[k] += &dx[k] * ap;
            self.z[k] += &dz[k] * ad;
            symmetrize(&mut self.x[k]);
            symmetrize(&mut self.z[k]);
        }
        for (yi, d) in self.y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
        Some(ap.max(ad))
    }

    fn infeasibility(&self, r: &Residuals, tol: f64) -> Option<SolveStatus> {
        // (y, Z) with Aᵀy + Z ≈ 0 and bᵀy > 0 is a primal infeasibility ray
        if r.dobj > 0.0 {
            let mut s = zero_blocks_dims(&self.dims);
            for (a, &yi) in self.a.iter().zip(&self.y) {
                a.axpy_into(yi, &mut s);
            }
            for (k, z) in self.z.iter().enumerate() {
                s[k] += z;
            }
            if blocks_norm(&s) / r.dobj < tol {
                return Some(SolveStatus::Infeasible);
            }
        }
        // X with A(X) ≈ 0 and ⟨C, X⟩ < 0 is an unbounded direction
        if r.pobj < 0.0 {
            let ax: Vec<f64> = self.a.iter().map(|a| a.inner(&self.x)).collect();
            if norm(&ax) / -r.pobj < tol {
                return Some(SolveStatus::Unbounded);
            }
        }
        None
    }

    /// Cholesky factor of `M_ij = tr(A_i X A_j Z⁻¹)`.
    fn schur_factor(&self, zinv: &[DMatrix<f64>]) -> Option<SchurFactor> {
        let m = self.a.len();
        let mut mat = DMatrix::<f64>::zeros(m, m);
        for (k, rows) in self.by_block.iter().enumerate() {
            let q = self.dims[k];
            let x = &self.x[k];
            let zi = &zinv[k];
            for (pos, (i, entries)) in rows.rows.iter().enumerate() {
                let p = if entries.len() * 2 > q {
                    let mut ad = DMatrix::<f64>::zeros(q, q);
                    for &(r, c, v) in entries {
                        ad[(r, c)] += v;
                        if r != c {
                            ad[(c, r)] += v;
                        }
                    }
                    x * (ad * zi)
                } else {
                    let mut p = DMatrix::<f64>::zeros(q, q);
                    for &(r, c, v) in entries {
                        p.ger(v, &x.column(r), &zi.row(c).transpose(), 1.0);
                        if r != c {
                            p.ger(v, &x.column(c), &zi.row(r).transpose(), 1.0);
                        }
                    }
                    p
                };
                for (j, entries_j) in &rows.rows[pos..] {
                    let mut s = 0.0;
                    for &(r, c, v) in entries_j {
                        s += if r == c {
                            v * p[(r, r)]
                        } else {
                            v * (p[(r, c)] + p[(c, r)])
                        };
                    }
                    mat[(*i, *j)] += s;
                }
            }
        }
        // only the upper triangle was accumulated
        mat.fill_lower_triangle_with_upper_triangle();
        match Cholesky::new(mat.clone()) {
            Some(ch) => Some(SchurFactor::Cholesky(ch)),
            None => {
                log::debug!("Schur matrix not numerically positive definite, using LU");
                let lu = mat.full_piv_lu();
                lu.is_invertible().then_some(SchurFactor::Lu(lu))
            }
        }
    }

    /// HKM direction for `ΔX + X ΔZ Z⁻¹ = G`.
    fn direction(
        &self,
        schur: &SchurFactor,
        zinv: &[DMatrix<f64>],
        r: &Residuals,
        g: &[DMatrix<f64>],
    ) -> Option<Direction> {
        // K = G - X Rd Z⁻¹;  M Δy = rp - A(K)
        let k_blocks: Vec<DMatrix<f64>> = (0..self.dims.len())
            .map(|k| &g[k] - &self.x[k] * &r.rd[k] * &zinv[k])
            .collect();
        let rhs = DVector::from_iterator(
            self.a.len(),
            self.a
                .iter()
                .zip(&r.rp)
                .map(|(a, rp)| rp - a.inner(&k_blocks)),
        );
        let dy = schur.solve(&rhs)?;
        let mut dz = r.rd.clone();
        for (a, &d) in self.a.iter().zip(dy.iter()) {
            a.axpy_into(-d, &mut dz);
        }
        let dx: Vec<DMatrix<f64>> = (0..self.dims.len())
            .map(|k| {
                let mut d = &g[k] - &self.x[k] * &dz[k] * &zinv[k];
                symmetrize(&mut d);
                d
            })
            .collect();
        Some((dx, dy.iter().copied().collect(), dz))
    }

    fn into_solution(self, problem: &SdpProblem, pre: &Presolved, status: SolveStatus) -> Solution {
        let r = self.residuals();
        let mut dual = vec![0.0; problem.num_constraints()];
        for (local, &i) in pre.kept.iter().enumerate() {
            dual[i] = self.y[local];
        }
        let mut x = self.x;
        let mut z = self.z;
        for (k, diag) in self.diagonal.iter().enumerate() {
            if *diag {
                x[k] = DMatrix::from_diagonal(&x[k].diagonal());
                z[k] = DMatrix::from_diagonal(&z[k].diagonal());
            }
        }
        Solution {
            primal_blocks: x,
            dual,
            dual_slack: z,
            objective_primal: r.pobj,
            objective_dual: r.dobj,
            gap: r.gap,
            primal_infeasibility: r.pinf,
            dual_infeasibility: r.dinf,
            iterations: self.iterations,
            status,
            dropped_constraints: pre.dropped.clone(),
        }
    }
}

impl SparseSymMatrix {
    fn to_dense_blocks_dims(&self, dims: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out = zero_blocks_dims(dims);
        self.axpy_into(1.0, &mut out);
        out
    }
}

fn zero_blocks_dims(dims: &[usize]) -> Vec<DMatrix<f64>> {
    dims.iter().map(|&d| DMatrix::zeros(d, d)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn blocks_norm(b: &[DMatrix<f64>]) -> f64 {
    b.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

fn blocks_dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut inv = Cholesky::new(m.clone())?.inverse();
    symmetrize(&mut inv);
    Some(inv)
}

/// Largest step `α <= 1` keeping `X + α ΔX ⪰ 0`, scaled by `fraction`.
fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>], fraction: f64) -> Option<f64> {
    let mut alpha = f64::INFINITY;
    for (xk, dk) in x.iter().zip(dx) {
        let l = Cholesky::new(xk.clone())?.l();
        let linv = l.solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows()))?;
        let mut w = &linv * dk * linv.transpose();
        symmetrize(&mut w);
        let lmin = SymmetricEigen::new(w).eigenvalues.min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Some((fraction * alpha).min(1.0))
}
