//! Reduction of the λ-problems under the symmetric group acting on letters.
//!
//! `σ ∈ S_n` acts on a Gram coordinate `(i, a, b)` by relabelling the letters
//! of the basis words `β_a`, `β_b` and moving block `i` to block `σ(i)` for
//! `i <= n`; block `n+1` and the λ block are fixed. The compiled problem is
//! invariant under this action, so an optimal solution can be averaged over
//! the group without loss.
//!
//! The reduced problem keeps one Gram block standing for `Y_1` and one for
//! `Y_{n+1}`. Its variables are lifted back to a full solution by the
//! averaging map
//!
//! ```text
//! Y_i     = mean over σ with σ(1) = i of σ·Y_1
//! Y_{n+1} = mean over σ of σ·Y_{n+1}
//! ```
//!
//! which maps PSD matrices to PSD matrices and reaches every invariant
//! feasible point. Constraints collapse to one per orbit of words under
//! letter relabelling and reversal.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use super::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::ncpoly::{words_up_to, Permutation, Word};
use crate::sdp::{
    Block, Constraint, FarkasCertificate, ProblemMeta, SdpProblem, Solution, SparseSymMatrix,
    SymEntry,
};

/// Partition of the Gram coordinates `(i, a, b)`, `i ∈ 1..=n+1`, into orbits
/// under `S_n` and matrix transposition.
#[derive(Clone, Debug)]
pub struct SymmetryOrbits {
    n: usize,
    q: usize,
    orbit_of: Vec<usize>,
    representatives: Vec<(usize, usize, usize)>,
}

impl SymmetryOrbits {
    pub fn compute(basis: &MonomialBasis) -> Self {
        let n = basis.n();
        let q = basis.len();
        let blocks = n + 1;
        let coord = |i: usize, a: usize, b: usize| ((i - 1) * q + a) * q + b;
        let mut uf = UnionFind::new(blocks * q * q);
        let mut generators = Vec::new();
        if n >= 2 {
            generators.push(Permutation::transposition(n, 1, 2));
            generators.push(Permutation::cycle(n));
        }
        let tables: Vec<_> = generators
            .iter()
            .map(|s| (s.clone(), basis.permutation_table(s)))
            .collect();
        for i in 1..=blocks {
            for a in 0..q {
                for b in 0..q {
                    let here = coord(i, a, b);
                    uf.union(here, coord(i, b, a));
                    for (s, t) in &tables {
                        let j = if i <= n { s.apply(i as u8) as usize } else { i };
                        uf.union(here, coord(j, t[a], t[b]));
                    }
                }
            }
        }
        let mut orbit_of = vec![usize::MAX; blocks * q * q];
        let mut root_to_orbit = HashMap::new();
        let mut representatives = Vec::new();
        for i in 1..=blocks {
            for a in 0..q {
                for b in 0..q {
                    let c = coord(i, a, b);
                    let root = uf.find(c);
                    let id = *root_to_orbit.entry(root).or_insert_with(|| {
                        representatives.push((i, a, b));
                        representatives.len() - 1
                    });
                    orbit_of[c] = id;
                }
            }
        }
        SymmetryOrbits {
            n,
            q,
            orbit_of,
            representatives,
        }
    }

    /// Orbit of the Gram coordinate `(i, a, b)`; `i` is the 1-based block index.
    pub fn orbit_id(&self, i: usize, a: usize, b: usize) -> Option<usize> {
        if i == 0 || i > self.n + 1 || a >= self.q || b >= self.q {
            return None;
        }
        Some(self.orbit_of[((i - 1) * self.q + a) * self.q + b])
    }

    /// One coordinate per orbit, the first in `(block, row, col)` order.
    pub fn representatives(&self) -> &[(usize, usize, usize)] {
        &self.representatives
    }

    /// Number of free scalar variables left after tying entries within orbits.
    pub fn num_free_variables(&self) -> usize {
        self.representatives.len()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        UnionFind {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// A symmetry-reduced λ-problem together with the data needed to lift its
/// solutions and certificates back to the full problem.
#[derive(Clone, Debug)]
pub struct ReducedProblem {
    pub problem: SdpProblem,
    pub orbits: SymmetryOrbits,
    meta: ProblemMeta,
    full_blocks: Vec<Block>,
    /// Reduced constraint index of every full constraint.
    constraint_class: Vec<usize>,
    class_sizes: Vec<usize>,
    /// Every group element with its action on basis positions.
    group: Vec<(Permutation, Vec<usize>)>,
}

impl ReducedProblem {
    pub fn meta(&self) -> ProblemMeta {
        self.meta
    }

    pub fn full_constraint_count(&self) -> usize {
        self.constraint_class.len()
    }

    /// Reduced constraint index for each full constraint.
    pub fn constraint_classes(&self) -> &[usize] {
        &self.constraint_class
    }

    /// Builds full Gram blocks from the reduced blocks `(λ, Y_1, Y_{n+1})`.
    pub fn lift_primal(&self, reduced: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        let n = self.meta.n;
        let q = self.full_blocks[1].dim;
        let mut full: Vec<DMatrix<f64>> = self
            .full_blocks
            .iter()
            .map(|b| DMatrix::zeros(b.dim, b.dim))
            .collect();
        full[0].copy_from(&reduced[0]);
        for (sigma, table) in &self.group {
            let target = sigma.apply(1) as usize;
            for a in 0..q {
                for b in 0..q {
                    full[target][(table[a], table[b])] += reduced[1][(a, b)];
                    full[n + 1][(table[a], table[b])] += reduced[2][(a, b)];
                }
            }
        }
        let stabilizer = (self.group.len() / n) as f64;
        for block in &mut full[1..=n] {
            *block /= stabilizer;
        }
        full[n + 1] /= self.group.len() as f64;
        full
    }

    /// Spreads reduced multipliers evenly over each class of full constraints.
    pub fn lift_dual(&self, reduced: &[f64]) -> Vec<f64> {
        self.constraint_class
            .iter()
            .map(|&k| reduced[k] / self.class_sizes[k] as f64)
            .collect()
    }

    pub fn lift_solution(&self, full_problem: &SdpProblem, sol: &Solution) -> Solution {
        let primal_blocks = self.lift_primal(&sol.primal_blocks);
        let dual = self.lift_dual(&sol.dual);
        let objective_primal = full_problem.objective.inner(&primal_blocks);
        let objective_dual: f64 = dual
            .iter()
            .zip(&full_problem.constraints)
            .map(|(y, c)| y * c.rhs)
            .sum();
        Solution {
            primal_blocks,
            dual,
            objective_primal,
            objective_dual,
            ..sol.clone()
        }
    }

    /// Lifts a certificate for the reduced pinned problem to the full one.
    /// Margin and PSD defect are carried over; re-check with the full data.
    pub fn lift_farkas(&self, cert: &FarkasCertificate) -> FarkasCertificate {
        let mut y = Vec::with_capacity(self.constraint_class.len() + 1);
        y.push(cert.y[0]);
        y.extend(self.lift_dual(&cert.y[1..]));
        FarkasCertificate { y, ..cert.clone() }
    }
}

/// Reduces a compiled λ-problem under the `S_n` letter action.
///
/// Fails with [`Error::InvarianceViolation`] when the data are not invariant
/// under the transposition `(1 2)` or the cycle `(1 2 ... n)`.
pub fn symmetry_reduce(problem: &SdpProblem) -> Result<ReducedProblem> {
    let meta = problem
        .meta
        .ok_or_else(|| Error::param("symmetry reduction needs a compiled λ-problem"))?;
    let ProblemMeta { n, d, .. } = meta;
    let basis = MonomialBasis::new(n, d)?;
    let q = basis.len();
    let words = words_up_to(n, 2 * d + 1);
    let shape_ok = problem.blocks.len() == n + 2
        && problem.blocks[0].dim == 1
        && problem.blocks[1..].iter().all(|b| b.dim == q)
        && problem.constraints.len() == words.len();
    if !shape_ok {
        return Err(Error::DimensionMismatch(format!(
            "problem shape does not match a compiled problem for n = {n}, d = {d}"
        )));
    }
    let word_index: HashMap<&Word, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();

    if n >= 2 {
        for (name, sigma) in [
            ("the transposition (1 2)", Permutation::transposition(n, 1, 2)),
            ("the cycle (1 2 ... n)", Permutation::cycle(n)),
        ] {
            check_invariance(problem, &basis, &words, &word_index, &sigma)
                .map_err(|()| Error::InvarianceViolation(name.to_string()))?;
        }
    }

    let group: Vec<_> = Permutation::all(n)
        .into_iter()
        .map(|s| {
            let t = basis.permutation_table(&s);
            (s, t)
        })
        .collect();
    let inverse_tables: Vec<(usize, Vec<usize>)> = group
        .iter()
        .map(|(s, _)| (s.apply(1) as usize, basis.permutation_table(&s.inverse())))
        .collect();

    // constraint classes: words up to relabelling and reversal
    let mut class_of_key: BTreeMap<Word, usize> = BTreeMap::new();
    let mut constraint_class = Vec::with_capacity(words.len());
    let mut representatives = Vec::new();
    for (j, w) in words.iter().enumerate() {
        let (p, r) = (w.pattern(), w.transpose().pattern());
        let key = if p <= r { p } else { r };
        let next = class_of_key.len();
        let k = *class_of_key.entry(key).or_insert(next);
        if k == representatives.len() {
            representatives.push(j);
        }
        constraint_class.push(k);
    }
    let mut class_sizes = vec![0usize; representatives.len()];
    for &k in &constraint_class {
        class_sizes[k] += 1;
    }

    let stabilizer = (group.len() / n) as f64;
    let full_group = group.len() as f64;
    let constraints = representatives
        .iter()
        .map(|&j| {
            let c = &problem.constraints[j];
            let mut by_block: Vec<Vec<&SymEntry>> = vec![Vec::new(); n + 2];
            for e in c.matrix.entries() {
                by_block[e.block].push(e);
            }
            let mut y1 = DMatrix::<f64>::zeros(q, q);
            let mut yl = DMatrix::<f64>::zeros(q, q);
            for (image_of_one, inv) in &inverse_tables {
                for e in &by_block[*image_of_one] {
                    add_upper(&mut y1, inv[e.row], inv[e.col], e.value);
                }
                for e in &by_block[n + 1] {
                    add_upper(&mut yl, inv[e.row], inv[e.col], e.value);
                }
            }
            let mut entries: Vec<SymEntry> = by_block[0].iter().map(|e| **e).collect();
            push_upper(&mut entries, 1, &y1, stabilizer);
            push_upper(&mut entries, 2, &yl, full_group);
            Constraint {
                matrix: SparseSymMatrix::from_entries(entries),
                rhs: c.rhs,
            }
        })
        .collect();

    let reduced = SdpProblem {
        blocks: vec![Block::dense(1), Block::dense(q), Block::dense(q)],
        objective: problem.objective.clone(),
        constraints,
        meta: None,
    };
    Ok(ReducedProblem {
        problem: reduced,
        orbits: SymmetryOrbits::compute(&basis),
        meta,
        full_blocks: problem.blocks.clone(),
        constraint_class,
        class_sizes,
        group,
    })
}

fn add_upper(m: &mut DMatrix<f64>, r: usize, c: usize, v: f64) {
    let (r, c) = if r <= c { (r, c) } else { (c, r) };
    m[(r, c)] += v;
}

fn push_upper(out: &mut Vec<SymEntry>, block: usize, m: &DMatrix<f64>, divisor: f64) {
    for col in 0..m.ncols() {
        for row in 0..=col {
            let v = m[(row, col)];
            if v != 0.0 {
                out.push(SymEntry {
                    block,
                    row,
                    col,
                    value: v / divisor,
                });
            }
        }
    }
}

fn check_invariance(
    problem: &SdpProblem,
    basis: &MonomialBasis,
    words: &[Word],
    word_index: &HashMap<&Word, usize>,
    sigma: &Permutation,
) -> std::result::Result<(), ()> {
    let n = basis.n();
    let table = basis.permutation_table(sigma);
    let map_entries = |m: &SparseSymMatrix| {
        SparseSymMatrix::from_entries(m.entries().iter().map(|e| {
            let block = if (1..=n).contains(&e.block) {
                sigma.apply(e.block as u8) as usize
            } else {
                e.block
            };
            let (row, col) = if e.block == 0 {
                (e.row, e.col)
            } else {
                (table[e.row], table[e.col])
            };
            SymEntry {
                block,
                row,
                col,
                value: e.value,
            }
        }))
    };
    if map_entries(&problem.objective) != problem.objective {
        return Err(());
    }
    for (j, w) in words.iter().enumerate() {
        let image = word_index[&w.relabel(sigma.images())];
        let c = &problem.constraints[j];
        let target = &problem.constraints[image];
        if c.rhs != target.rhs || map_entries(&c.matrix) != target.matrix {
            return Err(());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::Sign;
    use crate::sos::assemble_sdp;

    #[test]
    fn eleven_variables_for_m2_n3() {
        let p = assemble_sdp(2, 3, Sign::Plus).unwrap();
        let r = symmetry_reduce(&p).unwrap();
        assert_eq!(r.orbits.num_free_variables(), 11);
    }

    #[test]
    fn second_block_follows_first_for_n2() {
        let p = assemble_sdp(2, 2, Sign::Plus).unwrap();
        let r = symmetry_reduce(&p).unwrap();
        let o = &r.orbits;
        // Y_2 is the letter swap of Y_1: swap positions of X1 (1) and X2 (2)
        let swap = [0usize, 2, 1];
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(o.orbit_id(1, a, b), o.orbit_id(2, swap[a], swap[b]));
            }
        }
        // Y_1 has no internal symmetry beyond transposition
        assert_eq!(o.num_free_variables(), 6 + 4);
    }

    #[test]
    fn trivial_group_for_one_letter() {
        let p = assemble_sdp(1, 1, Sign::Minus).unwrap();
        let r = symmetry_reduce(&p).unwrap();
        assert_eq!(r.orbits.num_free_variables(), 2);
        assert_eq!(r.problem.num_constraints(), 2);
    }

    #[test]
    fn orbits_partition_and_respect_transpose() {
        let p = assemble_sdp(4, 4, Sign::Plus).unwrap();
        let r = symmetry_reduce(&p).unwrap();
        let o = &r.orbits;
        let q = 21;
        for i in 1..=5 {
            for a in 0..q {
                for b in 0..q {
                    let id = o.orbit_id(i, a, b).unwrap();
                    assert!(id < o.num_free_variables());
                    assert_eq!(Some(id), o.orbit_id(i, b, a));
                }
            }
        }
        assert_eq!(o.orbit_id(6, 0, 0), None);
    }

    #[test]
    fn rejects_non_invariant_data() {
        let mut p = assemble_sdp(2, 3, Sign::Plus).unwrap();
        // perturb one coefficient of the X1*X2 row only
        let k = words_up_to(3, 3)
            .iter()
            .position(|w| *w == Word::new(vec![1, 2]))
            .unwrap();
        p.constraints[k].rhs = -2.0;
        assert!(matches!(
            symmetry_reduce(&p),
            Err(Error::InvarianceViolation(_))
        ));
    }

    #[test]
    fn reduced_constraint_count_for_5_5() {
        let p = assemble_sdp(5, 5, Sign::Plus).unwrap();
        let r = symmetry_reduce(&p).unwrap();
        assert_eq!(r.full_constraint_count(), 3906);
        assert!(r.problem.num_constraints() < 76);
        assert_eq!(r.problem.block_dims(), vec![1, 31, 31]);
    }
}
