use std::fmt;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense symmetric matrix over arbitrary-precision rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(dim: usize) -> Self {
        RationalMatrix {
            dim,
            entries: vec![BigRational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, BigRational::from_integer(1.into()));
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged or asymmetric input.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("rows must form a square matrix".into()));
        }
        let entries: Vec<BigRational> = rows.into_iter().flatten().collect();
        let m = RationalMatrix { dim, entries };
        for i in 0..dim {
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::param(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from its lower triangle listed row by row.
    pub fn from_lower_triangle(vals: Vec<BigRational>) -> Result<Self> {
        let dim = crate::sdp::json::triangle_side(vals.len())?;
        let mut m = Self::zeros(dim);
        let mut it = vals.into_iter();
        for i in 0..dim {
            for j in 0..=i {
                m.set(i, j, it.next().expect("length checked"));
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[j * self.dim + i] = v.clone();
        self.entries[i * self.dim + j] = v;
    }

    pub fn lower_triangle(&self) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(self.dim * (self.dim + 1) / 2);
        for i in 0..self.dim {
            for j in 0..=i {
                out.push(self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            self.get(i, j).to_f64().unwrap_or(f64::NAN)
        })
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        f.debug_struct("RationalMatrix").field("rows", &rows).finish()
    }
}

/// Exact PSD test by `LDLᵀ` with pivoting on the largest remaining diagonal.
///
/// When the largest remaining diagonal entry is zero the remaining block
/// must vanish entirely.
pub fn psd_check_exact(m: &RationalMatrix) -> bool {
    let n = m.dim();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|(_, &x), (_, &y)| a[x][x].cmp(&a[y][y]))
            .expect("nonempty");
        let pivot = a[p][p].clone();
        if pivot < BigRational::zero() {
            return false;
        }
        if pivot.is_zero() {
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        }
        active.swap_remove(pos);
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &pivot;
            for &j in &active {
                if !a[p][j].is_zero() {
                    let delta = &f * &a[p][j];
                    a[i][j] -= delta;
                }
            }
        }
    }
    true
}
