use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ncpoly::{distinct_product_sum, falling_factorial};

pub const DEFAULT_INSTANCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    UpperLoewner,
    LowerLoewner,
    ImprovedM2,
    ImprovedM3,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::UpperLoewner => "upper Loewner bound",
            Violation::LowerLoewner => "lower Loewner bound",
            Violation::ImprovedM2 => "improved m=2 lower bound",
            Violation::ImprovedM3 => "improved m=3 lower bound (expectation-form constant)",
        })
    }
}

/// Evaluation of `Σ_{distinct} A_{j1}⋯A_{jm}` on one matrix tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceReport {
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    /// `each_psd[i]` is true when `A_{i+1} ⪰ -tol·I`.
    pub each_psd: Vec<bool>,
    /// `ΣA_i ⪯ (n + tol)·I`.
    pub sum_bounded: bool,
    pub min_eig: f64,
    pub max_eig: f64,
    /// `n!/(n-m)!`.
    pub bound: f64,
    /// The sharper lower bound for `m = 2` or `m = 3`, when one applies.
    pub improved_lower: Option<f64>,
    pub violations: Vec<Violation>,
}

impl InstanceReport {
    /// Whether the tuple satisfies the hypotheses of the inequalities.
    pub fn feasible(&self) -> bool {
        self.sum_bounded && self.each_psd.iter().all(|&p| p)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "dim": self.dim,
            "feasible": self.feasible(),
            "each_psd": self.each_psd,
            "sum_bounded": self.sum_bounded,
            "min_eig": self.min_eig,
            "max_eig": self.max_eig,
            "bound": self.bound,
            "improved_lower": self.improved_lower,
            "violations": self.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let sym = (m + m.transpose()) * 0.5;
    let e = SymmetricEigen::new(sym).eigenvalues;
    (e.min(), e.max())
}

/// Sharper lower bound on `Σ_{distinct}` for `m = 2` (all `n >= 2`) and
/// `m = 3` (`n >= 3`), as a negative number.
pub fn improved_lower_bound(m: usize, n: usize) -> Option<f64> {
    let nf = n as f64;
    match m {
        2 if n >= 2 => Some(-nf * (nf - 1.0) / 4.0),
        3 if n >= 3 => Some(-nf / (4.0 * (nf - 2.0)) * falling_factorial(n, 3) as f64),
        _ => None,
    }
}

/// Checks the hypotheses on `A` and evaluates the distinct-product sum
/// against `±n!/(n-m)!` and the improved lower bounds.
pub fn eval_instance(a: &[DMatrix<f64>], m: usize, tolerance: f64) -> Result<InstanceReport> {
    let n = a.len();
    if n == 0 {
        return Err(Error::param("at least one matrix is required"));
    }
    if m == 0 || m > n {
        return Err(Error::param(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let dim = a[0].nrows();
    for (i, x) in a.iter().enumerate() {
        if x.nrows() != dim || x.ncols() != dim {
            return Err(Error::param(format!(
                "matrix {} is {}x{}, expected {dim}x{dim}",
                i + 1,
                x.nrows(),
                x.ncols()
            )));
        }
        let asym = (x - x.transpose()).amax();
        if asym > tolerance.max(1e-12) * (1.0 + x.amax()) {
            return Err(Error::param(format!("matrix {} is not symmetric", i + 1)));
        }
    }
    let each_psd = a.iter().map(|x| eigen_range(x).0 >= -tolerance).collect();
    let sum = a.iter().fold(DMatrix::zeros(dim, dim), |s, x| s + x);
    let sum_bounded = eigen_range(&sum).1 <= n as f64 + tolerance;

    let value = distinct_product_sum::<f64>(m, n)?.evaluate(a)?;
    let (min_eig, max_eig) = eigen_range(&value);
    let bound = falling_factorial(n, m) as f64;
    let improved_lower = improved_lower_bound(m, n);

    let mut violations = Vec::new();
    if max_eig > bound + tolerance {
        violations.push(Violation::UpperLoewner);
    }
    if min_eig < -bound - tolerance {
        violations.push(Violation::LowerLoewner);
    }
    if let Some(lb) = improved_lower {
        if min_eig < lb - tolerance {
            violations.push(if m == 2 {
                Violation::ImprovedM2
            } else {
                Violation::ImprovedM3
            });
        }
    }
    Ok(InstanceReport {
        n,
        m,
        dim,
        each_psd,
        sum_bounded,
        min_eig,
        max_eig,
        bound,
        improved_lower,
        violations,
    })
}

fn matrix_from_json(v: &Value) -> Result<DMatrix<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::param("each matrix must be an array"))?;
    let num = |x: &Value| -> Result<f64> {
        match x {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::param("number out of range")),
            Value::String(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::param(format!("not a number: {s:?}"))),
            _ => Err(Error::param(format!("expected a number, found {x}"))),
        }
    };
    if arr.iter().all(Value::is_array) {
        let rows: Vec<Vec<f64>> = arr
            .iter()
            .map(|r| r.as_array().expect("checked").iter().map(num).collect())
            .collect::<Result<_>>()?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::param("matrix rows must form a square"));
        }
        return Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]));
    }
    let flat: Vec<f64> = arr.iter().map(num).collect::<Result<_>>()?;
    let d = (flat.len() as f64).sqrt().round() as usize;
    if d * d != flat.len() {
        return Err(Error::param(format!("{} entries do not form a square matrix", flat.len())));
    }
    Ok(DMatrix::from_row_slice(d, d, &flat))
}

/// Reads `{"n": .., "m": .., "matrices": [..]}`; each matrix is either a
/// flat row-major list or a list of rows.
pub fn instance_from_json(v: &Value) -> Result<(usize, Vec<DMatrix<f64>>)> {
    let mats = v
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::param("missing field \"matrices\""))?
        .iter()
        .map(matrix_from_json)
        .collect::<Result<Vec<_>>>()?;
    let m = crate::sdp::json::get_usize(v, "m")?;
    if let Ok(n) = crate::sdp::json::get_usize(v, "n") {
        if n != mats.len() {
            return Err(Error::param(format!("n = {n} but {} matrices given", mats.len())));
        }
    }
    Ok((m, mats))
}

pub fn instance_to_json(m: usize, a: &[DMatrix<f64>]) -> Value {
    let mats: Vec<Value> = a
        .iter()
        .map(|x| {
            let mut flat = Vec::with_capacity(x.len());
            for i in 0..x.nrows() {
                for j in 0..x.ncols() {
                    flat.push(x[(i, j)]);
                }
            }
            json!(flat)
        })
        .collect();
    json!({"n": a.len(), "m": m, "matrices": mats})
}

/// The pair on which `A1A2 + A2A1` attains `-1/2`.
pub fn sharp_pair() -> Vec<DMatrix<f64>> {
    let r = 2f64.sqrt() / 3.0;
    vec![
        DMatrix::from_row_slice(2, 2, &[1.5, 0.0, 0.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[1.0 / 6.0, r, r, 4.0 / 3.0]),
    ]
}
