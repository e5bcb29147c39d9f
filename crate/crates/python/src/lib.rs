use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ncagm_core::certify::{build_m2_certificate, eval_instance, verify_sos_detailed};
use ncagm_core::cli::{cmd_table, RunConfig};
use ncagm_core::ncpoly::{distinct_product_sum, falling_factorial as falling};
use ncagm_core::sdp::{self, SdpProblem, Sign, SolverOptions};
use ncagm_core::sos::{assemble_sdp, refute_lambda as refute, solve_bound as bound};

fn err(e: ncagm_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sign(s: &str) -> PyResult<Sign> {
    s.parse().map_err(err)
}

fn options(tol: f64) -> SolverOptions {
    SolverOptions {
        tolerance: tol,
        ..SolverOptions::default()
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// A compiled semidefinite program in primal standard form.
#[pyclass(module = "ncagm", frozen)]
pub struct Problem {
    inner: SdpProblem,
}

#[pymethods]
impl Problem {
    /// The λ-problem for `λ ± Σ_{distinct} X_{j1}⋯X_{jm}`.
    #[staticmethod]
    #[pyo3(signature = (m, n, sign = "plus"))]
    fn assemble(m: usize, n: usize, sign: &str) -> PyResult<Self> {
        let inner = assemble_sdp(m, n, self::sign(sign)?).map_err(err)?;
        Ok(Problem { inner })
    }

    #[staticmethod]
    fn from_sdpa(text: &str) -> PyResult<Self> {
        let inner = sdp::import_sdpa_str(text).map_err(err)?;
        Ok(Problem { inner })
    }

    fn to_sdpa(&self) -> String {
        sdp::export_sdpa_string(&self.inner)
    }

    #[getter]
    fn num_constraints(&self) -> usize {
        self.inner.num_constraints()
    }

    #[getter]
    fn block_dims(&self) -> Vec<usize> {
        self.inner.block_dims()
    }

    #[getter]
    fn total_dim(&self) -> usize {
        self.inner.total_dim()
    }

    #[getter]
    fn scalar_unknowns(&self) -> usize {
        self.inner.scalar_unknowns()
    }

    /// Solves the program as given, without symmetry reduction.
    #[pyo3(signature = (tol = 1e-8))]
    fn solve(&self, py: Python<'_>, tol: f64) -> PyResult<Solution> {
        let inner = py
            .detach(|| sdp::solve(&self.inner, &options(tol)))
            .map_err(err)?;
        Ok(Solution { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(constraints={}, blocks={:?})",
            self.inner.num_constraints(),
            self.inner.block_dims()
        )
    }
}

/// Result of an interior-point solve.
#[pyclass(module = "ncagm", frozen)]
pub struct Solution {
    inner: sdp::Solution,
}

#[pymethods]
impl Solution {
    #[getter]
    fn status(&self) -> String {
        self.inner.status.to_string()
    }

    #[getter]
    fn objective_primal(&self) -> f64 {
        self.inner.objective_primal
    }

    #[getter]
    fn objective_dual(&self) -> f64 {
        self.inner.objective_dual
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.inner.gap
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn dual(&self) -> Vec<f64> {
        self.inner.dual.clone()
    }

    /// Primal blocks as nested lists.
    #[getter]
    fn blocks(&self) -> Vec<Vec<Vec<f64>>> {
        self.inner.primal_blocks.iter().map(rows).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(status={}, objective={:.8}, gap={:.2e})",
            self.inner.status, self.inner.objective_primal, self.inner.gap
        )
    }
}

/// `n!/(n-m)!`, the number of terms of the distinct-product sum.
#[pyfunction]
fn falling_factorial(n: usize, m: usize) -> u128 {
    falling(n, m)
}

/// `Σ_{distinct} X_{j1}⋯X_{jm}` rendered as text.
#[pyfunction]
fn distinct_sum(m: usize, n: usize) -> PyResult<String> {
    Ok(distinct_product_sum::<f64>(m, n).map_err(err)?.to_string())
}

/// Solves one λ-problem and returns λ with solver diagnostics.
#[pyfunction]
#[pyo3(signature = (m, n, sign = "plus", symmetry = true, tol = 1e-8))]
fn solve_bound<'py>(
    py: Python<'py>,
    m: usize,
    n: usize,
    sign: &str,
    symmetry: bool,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sign = self::sign(sign)?;
    let r = py
        .detach(|| bound(m, n, sign, symmetry, &options(tol)))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lambda", r.lambda())?;
    d.set_item("status", r.solution.status.to_string())?;
    d.set_item("gap", r.solution.gap)?;
    d.set_item("iterations", r.solution.iterations)?;
    d.set_item("solved_constraints", r.solved_constraints)?;
    d.set_item("free_variables", r.free_variables)?;
    Ok(d)
}

/// Searches for a Farkas certificate refuting `λ = lambda_target`; `None` if absent.
#[pyfunction]
#[pyo3(signature = (m, n, lambda_target, sign = "plus", symmetry = true, tol = 1e-8, psd_tol = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn refute_lambda<'py>(
    py: Python<'py>,
    m: usize,
    n: usize,
    lambda_target: f64,
    sign: &str,
    symmetry: bool,
    tol: f64,
    psd_tol: f64,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let sign = self::sign(sign)?;
    let (_, cert) = py
        .detach(|| refute(m, n, sign, lambda_target, symmetry, &options(tol), psd_tol))
        .map_err(err)?;
    let Some(cert) = cert else { return Ok(None) };
    let d = PyDict::new(py);
    d.set_item("lambda_target", cert.lambda_target)?;
    d.set_item("margin", cert.margin)?;
    d.set_item("psd_defect", cert.psd_defect)?;
    d.set_item("y", cert.y)?;
    Ok(Some(d))
}

/// Builds the closed-form `m = 2` certificate and checks it exactly.
/// Returns `(valid, lambda)` with `lambda` as a `"p/q"` string.
#[pyfunction]
fn verify_m2_certificate(n: usize) -> PyResult<(bool, String)> {
    let cert = build_m2_certificate(n).map_err(err)?;
    let v = verify_sos_detailed(&cert).map_err(err)?;
    Ok((v.is_valid(), cert.lambda.to_string()))
}

/// Evaluates the distinct-product sum on a tuple of symmetric matrices.
#[pyfunction]
#[pyo3(signature = (matrices, m, tol = 1e-9))]
fn check_instance<'py>(
    py: Python<'py>,
    matrices: Vec<Vec<Vec<f64>>>,
    m: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let mats = matrices
        .iter()
        .map(|rows| {
            let d = rows.len();
            if rows.iter().any(|r| r.len() != d) {
                return Err(PyValueError::new_err("each matrix must be square"));
            }
            Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let r = eval_instance(&mats, m, tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("feasible", r.feasible())?;
    d.set_item("min_eig", r.min_eig)?;
    d.set_item("max_eig", r.max_eig)?;
    d.set_item("bound", r.bound)?;
    d.set_item("improved_lower", r.improved_lower)?;
    d.set_item(
        "violations",
        r.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

type RowTuple = (usize, usize, Option<f64>, Option<f64>, f64, String);

/// Solves both λ-problems for each `(m, n)`; rows are
/// `(m, n, lambda1, lambda2, bound, verdict)`.
#[pyfunction]
#[pyo3(signature = (rows, symmetry = true, tol = 1e-8, verdict_tol = 1e-6))]
fn table(
    py: Python<'_>,
    rows: Vec<(usize, usize)>,
    symmetry: bool,
    tol: f64,
    verdict_tol: f64,
) -> PyResult<Vec<RowTuple>> {
    let config = RunConfig {
        symmetry,
        tolerance: tol,
        ..RunConfig::default()
    };
    let t = py
        .detach(|| cmd_table(&rows, &config, verdict_tol))
        .map_err(err)?;
    Ok(t.into_iter()
        .map(|r| (r.m, r.n, r.lambda1, r.lambda2, r.bound, r.verdict))
        .collect())
}

#[pymodule]
fn ncagm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(falling_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(distinct_sum, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bound, m)?)?;
    m.add_function(wrap_pyfunction!(refute_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(verify_m2_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(check_instance, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    Ok(())
}
