use std::collections::HashMap;

use super::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::ncpoly::{distinct_product_sum, words_up_to, Word};
use crate::sdp::{Block, Constraint, ProblemMeta, SdpProblem, Sign, SparseSymMatrix, SymEntry};

/// Degree of the monomial basis used for target degree `m`.
pub fn basis_degree(m: usize) -> usize {
    m / 2
}

/// Compiles `λ + sign·Σ_{distinct} X_{j1}⋯X_{jm} = Σ_i tr(β ℓ_i βᵀ Y_i)` into
/// a standard-form SDP minimizing `λ`.
///
/// Block 0 is the 1×1 block holding `λ`; blocks `1..=n+1` are the Gram
/// matrices `Y_i`. There is one constraint per word of degree `<= 2d+1` in
/// canonical order, written as
///
/// ```text
/// λ·[w = 1] - Σ_i ⟨A_{w,i}, Y_i⟩ = -sign · coeff_w(Σ_{distinct} X_{j1}⋯X_{jm})
/// ```
pub fn assemble_sdp(m: usize, n: usize, sign: Sign) -> Result<SdpProblem> {
    if m == 0 || m > n {
        return Err(Error::param(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let d = basis_degree(m);
    let basis = MonomialBasis::new(n, d)?;
    let q = basis.len();
    let words = words_up_to(n, 2 * d + 1);
    let word_index: HashMap<&Word, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();

    let mut rows: Vec<Vec<SymEntry>> = vec![Vec::new(); words.len()];
    rows[0].push(SymEntry {
        block: 0,
        row: 0,
        col: 0,
        value: 1.0,
    });
    for i in 1..=n + 1 {
        for a in 0..q {
            for b in 0..q {
                let (row, col) = if a <= b { (a, b) } else { (b, a) };
                // entries (a, b) and (b, a) share one stored upper-triangle slot
                let weight = if a == b { 1.0 } else { 0.5 };
                for (w, c) in basis.gram_terms(i, a, b) {
                    let k = word_index[&w];
                    rows[k].push(SymEntry {
                        block: i,
                        row,
                        col,
                        value: -weight * c as f64,
                    });
                }
            }
        }
    }

    let target = distinct_product_sum::<f64>(m, n)?;
    let s = sign.value() as f64;
    let constraints = rows
        .into_iter()
        .zip(&words)
        .map(|(entries, w)| Constraint {
            matrix: SparseSymMatrix::from_entries(entries),
            rhs: -s * target.coeff(w),
        })
        .collect();

    let mut blocks = vec![Block::dense(1)];
    blocks.extend(std::iter::repeat_n(Block::dense(q), n + 1));
    Ok(SdpProblem {
        blocks,
        objective: SparseSymMatrix::from_entries([SymEntry {
            block: 0,
            row: 0,
            col: 0,
            value: 1.0,
        }]),
        constraints,
        meta: Some(ProblemMeta { m, n, d, sign }),
    })
}
