use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use super::permutation::Permutation;
use super::word::Word;
use crate::error::{Error, Result};

/// Scalar ring for polynomial coefficients.
///
/// Implemented for `f64` (solver-facing assembly) and [`BigRational`]
/// (exact certificates).
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Num
    + Signed
    + Neg<Output = Self>
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
}

impl Coeff for f64 {}
impl Coeff for BigRational {}

/// A polynomial in `n` noncommuting letters `X1..Xn`.
///
/// Terms are kept canonical after every operation: each word appears at
/// most once and no zero coefficient is stored.
#[derive(Clone, PartialEq)]
pub struct NcPoly<T> {
    nvars: usize,
    terms: BTreeMap<Word, T>,
}

impl<T: Coeff> NcPoly<T> {
    pub fn zero(nvars: usize) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::param("alphabet must have at least one letter"));
        }
        if nvars > u8::MAX as usize {
            return Err(Error::param(format!("alphabet of {nvars} letters is too large")));
        }
        Ok(NcPoly {
            nvars,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(nvars: usize, c: T) -> Result<Self> {
        Self::from_terms(nvars, [(Word::unit(), c)])
    }

    pub fn one(nvars: usize) -> Result<Self> {
        Self::constant(nvars, T::one())
    }

    /// The letter `X_i` (1-based).
    pub fn variable(nvars: usize, i: u8) -> Result<Self> {
        Self::from_terms(nvars, [(Word::letter(i), T::one())])
    }

    /// Sums the given terms; repeated words accumulate. Letters must lie in `1..=nvars`.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Word, T)>) -> Result<Self> {
        let mut p = Self::zero(nvars)?;
        for (w, c) in terms {
            if w.max_letter() as usize > nvars {
                return Err(Error::param(format!(
                    "word {w} uses a letter outside 1..={nvars}"
                )));
            }
            p.add_term(w, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> T {
        self.terms.get(w).cloned().unwrap_or_else(T::zero)
    }

    /// Highest word length present; zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, w: Word, c: T) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return NcPoly {
                nvars: self.nvars,
                terms: BTreeMap::new(),
            };
        }
        NcPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(w, a)| (w.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    /// Reverses every word.
    pub fn transpose(&self) -> Self {
        NcPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.transpose(), c.clone()))
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(w, c)| self.terms.get(&w.transpose()) == Some(c))
    }

    /// Relabels each letter `i` as `sigma(i)`.
    pub fn apply_permutation(&self, sigma: &Permutation) -> Self {
        assert_eq!(
            sigma.size(),
            self.nvars,
            "permutation and polynomial use different alphabets"
        );
        NcPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.relabel(sigma.images()), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<U: Coeff>(&self, f: impl Fn(&T) -> U) -> NcPoly<U> {
        let mut out = NcPoly::<U> {
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Evaluates at a tuple of square matrices of equal size.
    pub fn evaluate(&self, mats: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
        if mats.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices supplied for {} letters",
                mats.len(),
                self.nvars
            )));
        }
        let dim = mats[0].nrows();
        if mats.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::DimensionMismatch(
                "matrices must be square of one common size".into(),
            ));
        }
        let mut acc = DMatrix::<f64>::zeros(dim, dim);
        for (w, c) in &self.terms {
            let mut prod = DMatrix::<f64>::identity(dim, dim);
            for &l in w.letters() {
                prod = &prod * &mats[l as usize - 1];
            }
            acc += prod * c.to_f64().unwrap_or(f64::NAN);
        }
        Ok(acc)
    }
}

/// Sum of `X_{j1} ⋯ X_{jm}` over all injective index tuples, each with coefficient one.
///
/// The result has exactly `n!/(n-m)!` terms.
pub fn distinct_product_sum<T: Coeff>(m: usize, n: usize) -> Result<NcPoly<T>> {
    if m == 0 || m > n {
        return Err(Error::param(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let mut poly = NcPoly::zero(n)?;
    let mut current = Vec::with_capacity(m);
    let mut used = vec![false; n + 1];
    fn rec<T: Coeff>(
        m: usize,
        n: usize,
        current: &mut Vec<u8>,
        used: &mut [bool],
        poly: &mut NcPoly<T>,
    ) {
        if current.len() == m {
            poly.add_term(Word::new(current.clone()), T::one());
            return;
        }
        for l in 1..=n {
            if !used[l] {
                used[l] = true;
                current.push(l as u8);
                rec(m, n, current, used, poly);
                current.pop();
                used[l] = false;
            }
        }
    }
    rec(m, n, &mut current, &mut used, &mut poly);
    Ok(poly)
}

impl<T: Coeff> Add for &NcPoly<T> {
    type Output = NcPoly<T>;

    fn add(self, rhs: &NcPoly<T>) -> NcPoly<T> {
        assert_eq!(self.nvars, rhs.nvars, "polynomials over different alphabets");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl<T: Coeff> Sub for &NcPoly<T> {
    type Output = NcPoly<T>;

    fn sub(self, rhs: &NcPoly<T>) -> NcPoly<T> {
        assert_eq!(self.nvars, rhs.nvars, "polynomials over different alphabets");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl<T: Coeff> Neg for &NcPoly<T> {
    type Output = NcPoly<T>;

    fn neg(self) -> NcPoly<T> {
        NcPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect(),
        }
    }
}

impl<T: Coeff> Mul for &NcPoly<T> {
    type Output = NcPoly<T>;

    fn mul(self, rhs: &NcPoly<T>) -> NcPoly<T> {
        assert_eq!(self.nvars, rhs.nvars, "polynomials over different alphabets");
        let mut out = NcPoly {
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u.concat(v), a.clone() * b.clone());
            }
        }
        out
    }
}

impl<T: Coeff> fmt::Display for NcPoly<T> {
    /// Renders terms in canonical word order, e.g. `-X3 + 2*X1*X2`; the zero polynomial renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if w.is_unit() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

impl<T: Coeff> fmt::Debug for NcPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NcPoly[n={}]({self})", self.nvars)
    }
}
