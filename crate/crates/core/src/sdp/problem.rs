use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two Loewner bounds a problem certifies.
///
/// `Minus` is the problem for `λ - Σ` (upper bound, `λ₁`), `Plus` the one for
/// `λ + Σ` (lower bound, `λ₂`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "minus")]
    Minus,
    #[serde(rename = "plus")]
    Plus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::param(format!("sign must be +1 or -1, got {v}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "minus",
            Sign::Plus => "plus",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" | "+1" | "1" => Ok(Sign::Plus),
            "minus" | "-" | "-1" => Ok(Sign::Minus),
            _ => Err(Error::param(format!("unknown sign {s:?}"))),
        }
    }
}

/// Parameters of a compiled λ-problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProblemMeta {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub sign: Sign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Dense,
    /// A block whose variable is diagonal (negative size in SDPA files).
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub dim: usize,
    pub kind: BlockKind,
}

impl Block {
    pub fn dense(dim: usize) -> Self {
        Block {
            dim,
            kind: BlockKind::Dense,
        }
    }

    pub fn diagonal(dim: usize) -> Self {
        Block {
            dim,
            kind: BlockKind::Diagonal,
        }
    }
}

/// One upper-triangle entry of a block-diagonal symmetric matrix (0-based, `row <= col`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Sparse block-diagonal symmetric matrix stored as its upper triangle.
///
/// Entries are sorted by `(block, row, col)`, unique and nonzero. An
/// off-diagonal entry `v` at `(r, c)` stands for `v` at both `(r, c)` and `(c, r)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SparseSymMatrix {
    entries: Vec<SymEntry>,
}

impl SparseSymMatrix {
    /// Canonicalizes arbitrary entries: lower-triangle coordinates are
    /// mirrored, duplicates summed and zeros dropped.
    pub fn from_entries(entries: impl IntoIterator<Item = SymEntry>) -> Self {
        let mut v: Vec<SymEntry> = entries
            .into_iter()
            .map(|mut e| {
                if e.row > e.col {
                    std::mem::swap(&mut e.row, &mut e.col);
                }
                e
            })
            .collect();
        v.sort_by_key(|e| (e.block, e.row, e.col));
        let mut out: Vec<SymEntry> = Vec::with_capacity(v.len());
        for e in v {
            match out.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => {
                    last.value += e.value;
                }
                _ => out.push(e),
            }
        }
        out.retain(|e| e.value != 0.0);
        SparseSymMatrix { entries: out }
    }

    pub fn entries(&self) -> &[SymEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.value.abs()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let w = if e.row == e.col { 1.0 } else { 2.0 };
                w * e.value * e.value
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self, X⟩ = tr(self · X)` for dense symmetric blocks `X`.
    pub fn inner(&self, blocks: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let x = &blocks[e.block];
                if e.row == e.col {
                    e.value * x[(e.row, e.col)]
                } else {
                    e.value * (x[(e.row, e.col)] + x[(e.col, e.row)])
                }
            })
            .sum()
    }

    /// Adds `alpha · self` into dense blocks.
    pub fn axpy_into(&self, alpha: f64, blocks: &mut [DMatrix<f64>]) {
        for e in &self.entries {
            let x = &mut blocks[e.block];
            x[(e.row, e.col)] += alpha * e.value;
            if e.row != e.col {
                x[(e.col, e.row)] += alpha * e.value;
            }
        }
    }

    pub fn to_dense_blocks(&self, blocks: &[Block]) -> Vec<DMatrix<f64>> {
        let mut out = zero_blocks(blocks);
        self.axpy_into(1.0, &mut out);
        out
    }
}

pub fn zero_blocks(blocks: &[Block]) -> Vec<DMatrix<f64>> {
    blocks.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect()
}

/// An equality constraint `⟨A, Y⟩ = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub matrix: SparseSymMatrix,
    pub rhs: f64,
}

/// Block-diagonal semidefinite program in primal standard form:
///
/// ```text
/// minimize ⟨C, Y⟩  subject to  ⟨A_i, Y⟩ = b_i,  Y = diag(Y_0, ..., Y_k) ⪰ 0
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<Block>,
    pub objective: SparseSymMatrix,
    pub constraints: Vec<Constraint>,
    pub meta: Option<ProblemMeta>,
}

impl SdpProblem {
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    /// Sum of block sizes, i.e. the side of the full block-diagonal matrix.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Number of scalar unknowns counting every matrix entry (`Σ dim²`).
    pub fn scalar_unknowns(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.rhs).collect()
    }

    /// Checks block indices, triangle orientation and diagonal-block structure.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.iter().any(|b| b.dim == 0) {
            return Err(Error::param("block dimensions must be positive"));
        }
        let check = |m: &SparseSymMatrix, what: &str| -> Result<()> {
            for e in m.entries() {
                let Some(b) = self.blocks.get(e.block) else {
                    return Err(Error::IndexOutOfRange(format!(
                        "{what}: block {} of {}",
                        e.block,
                        self.blocks.len()
                    )));
                };
                if e.col >= b.dim || e.row > e.col {
                    return Err(Error::IndexOutOfRange(format!(
                        "{what}: entry ({}, {}) in block {} of size {}",
                        e.row, e.col, e.block, b.dim
                    )));
                }
                if b.kind == BlockKind::Diagonal && e.row != e.col {
                    return Err(Error::param(format!(
                        "{what}: off-diagonal entry in diagonal block {}",
                        e.block
                    )));
                }
                if !e.value.is_finite() {
                    return Err(Error::param(format!("{what}: non-finite coefficient")));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, c) in self.constraints.iter().enumerate() {
            check(&c.matrix, &format!("constraint {}", i + 1))?;
            if !c.rhs.is_finite() {
                return Err(Error::param(format!("constraint {}: non-finite rhs", i + 1)));
            }
        }
        Ok(())
    }

    /// Primal residual `b - A(Y)` for dense blocks.
    pub fn primal_residual(&self, y: &[DMatrix<f64>]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| c.rhs - c.matrix.inner(y))
            .collect()
    }
}
