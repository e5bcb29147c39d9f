use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ncpoly::{words_up_to, Coeff, NcPoly, Permutation, Word};

/// All words of degree `<= d` over `n` letters, in canonical order.
///
/// Its size is `q = 1 + n + n² + ... + n^d`; position 0 is the unit word.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n: usize,
    d: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::param(format!("alphabet size {n} outside 1..=255")));
        }
        let words = words_up_to(n, d);
        let index = words
            .iter()
            .enumerate()
            .map(|(k, w)| (w.clone(), k))
            .collect();
        Ok(MonomialBasis { n, d, words, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, a: usize) -> &Word {
        &self.words[a]
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Where each basis position goes when letters are relabelled by `sigma`.
    pub fn permutation_table(&self, sigma: &Permutation) -> Vec<usize> {
        self.words
            .iter()
            .map(|w| self.index[&w.relabel(sigma.images())])
            .collect()
    }

    /// Words (with integer coefficients) of the Gram entry `β_aᵀ ℓ_i β_b`,
    /// where `ℓ_i = X_i` for `i <= n` and `ℓ_{n+1} = n - X_1 - ... - X_n`.
    ///
    /// Indices are unchecked; `i` is 1-based, `a` and `b` are basis positions.
    pub(crate) fn gram_terms(&self, i: usize, a: usize, b: usize) -> Vec<(Word, i64)> {
        let left = self.words[a].transpose();
        let right = &self.words[b];
        if i <= self.n {
            vec![(left.sandwich(i as u8, right), 1)]
        } else {
            let mut out = Vec::with_capacity(self.n + 1);
            out.push((left.concat(right), self.n as i64));
            for k in 1..=self.n as u8 {
                out.push((left.sandwich(k, right), -1));
            }
            out
        }
    }
}

/// The linear constraint polynomials `ℓ_1 = X_1, ..., ℓ_n = X_n, ℓ_{n+1} = n - ΣX_k`.
pub fn constraint_polynomial<T: Coeff>(n: usize, i: usize) -> Result<NcPoly<T>> {
    if i == 0 || i > n + 1 {
        return Err(Error::IndexOutOfRange(format!(
            "constraint index {i} outside 1..={}",
            n + 1
        )));
    }
    if i <= n {
        return NcPoly::variable(n, i as u8);
    }
    let mut terms = vec![(Word::unit(), T::from_usize(n).expect("small integer"))];
    terms.extend((1..=n as u8).map(|k| (Word::letter(k), -T::one())));
    NcPoly::from_terms(n, terms)
}

/// `β_aᵀ · ℓ_i · β_b` as a polynomial.
///
/// `i` is 1-based in `1..=n+1`; `a`, `b` are 0-based basis positions.
pub fn localizing_entry<T: Coeff>(
    basis: &MonomialBasis,
    i: usize,
    a: usize,
    b: usize,
) -> Result<NcPoly<T>> {
    let n = basis.n();
    if i == 0 || i > n + 1 {
        return Err(Error::IndexOutOfRange(format!(
            "constraint index {i} outside 1..={}",
            n + 1
        )));
    }
    if a >= basis.len() || b >= basis.len() {
        return Err(Error::IndexOutOfRange(format!(
            "basis positions ({a}, {b}) outside 0..{}",
            basis.len()
        )));
    }
    NcPoly::from_terms(
        n,
        basis
            .gram_terms(i, a, b)
            .into_iter()
            .map(|(w, c)| (w, T::from_i64(c).expect("small integer"))),
    )
}
