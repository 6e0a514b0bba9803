//! Python bindings: Paley graphs, classical bounds, the SOS₂/SOS₄/FK₄
//! relaxations, graph-matrix norms and the sweep/fit harness.

use paley_sos::graphmx::{shape_norm, Shape};
use paley_sos::harness::{self, Quantity};
use paley_sos::{field, paley, pseudomoments, sdp, Error, PaleyGraph as CoreGraph};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotPrime(_) | Error::NotOneModFour(_) | Error::InvalidParameter(_) | Error::UnknownShape(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// The Paley graph G_p on F_p, p ≡ 1 (mod 4).
#[pyclass(name = "PaleyGraph", frozen)]
struct PyPaleyGraph {
    inner: CoreGraph,
}

#[pymethods]
impl PyPaleyGraph {
    #[new]
    fn new(p: u64) -> PyResult<Self> {
        Ok(PyPaleyGraph { inner: CoreGraph::from_prime(p).map_err(to_py)? })
    }

    /// The prime p.
    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    /// Whether a and b are adjacent (a − b a nonzero square).
    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.inner.adjacent(a, b)
    }

    /// (λ, μ) = ((p−5)/4, (p−1)/4) and whether direct counting confirms them.
    fn strong_regularity(&self) -> (usize, usize, bool) {
        self.inner.strong_regularity()
    }

    /// Adjacency eigenvalues, sorted nondecreasing.
    fn adjacency_spectrum(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.spectra().map_err(to_py)?.adjacency)
    }

    /// Seidel eigenvalues, sorted nondecreasing.
    fn seidel_spectrum(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.spectra().map_err(to_py)?.seidel)
    }

    /// Exact clique number ω(G_p).
    fn clique_number(&self) -> PyResult<usize> {
        self.inner.clique_number().map_err(to_py)
    }

    /// Degree-2 SOS value (≈ √p).
    fn sos2(&self, tol: f64, max_iter: usize) -> PyResult<PySdpResult> {
        let prob = sdp::build_sos2(self.inner.graph()).map_err(to_py)?;
        PySdpResult::solve(&prob, tol, max_iter)
    }

    /// Degree-4 SOS value.
    fn sos4(&self, tol: f64, max_iter: usize) -> PyResult<PySdpResult> {
        let prob = sdp::build_sos4(self.inner.graph()).map_err(to_py)?;
        PySdpResult::solve(&prob, tol, max_iter)
    }

    /// Certified bracket (lo, hi) of the degree-4 FK value.
    fn fk4(&self, tol: f64) -> PyResult<(f64, f64)> {
        let r = pseudomoments::fk4_value(&self.inner, tol).map_err(to_py)?;
        Ok((r.lo, r.hi))
    }

    /// Spectral norm of a graph matrix, e.g. `shape_norm("T441")`.
    #[pyo3(signature = (shape, left=None, right=None, tol=1e-8))]
    fn shape_norm(&self, shape: &str, left: Option<usize>, right: Option<usize>, tol: f64) -> PyResult<f64> {
        let shape: Shape = shape.parse().map_err(to_py)?;
        Ok(shape_norm(&self.inner, shape, left, right, tol).map_err(to_py)?.0.value)
    }

    fn __repr__(&self) -> String {
        format!("PaleyGraph(p={})", self.inner.p())
    }
}

/// Outcome of an SDP solve.
#[pyclass(name = "SdpResult", frozen, get_all)]
struct PySdpResult {
    /// Primal objective at the returned iterate.
    value: f64,
    /// Certified upper bound from the dual iterate.
    upper_bound: f64,
    /// "optimal" or "max_iter".
    status: String,
    /// Iterations taken.
    iterations: usize,
    /// Final primal residual.
    primal_residual: f64,
    /// Final dual residual.
    dual_residual: f64,
    /// Final relative duality gap.
    gap: f64,
}

impl PySdpResult {
    fn solve(prob: &sdp::SdpProblem, tol: f64, max_iter: usize) -> PyResult<Self> {
        let s = sdp::solve(prob, tol, max_iter).map_err(to_py)?;
        Ok(PySdpResult {
            value: s.value,
            upper_bound: s.upper_bound,
            status: s.status.to_string(),
            iterations: s.iterations,
            primal_residual: s.primal_residual,
            dual_residual: s.dual_residual,
            gap: s.gap,
        })
    }
}

#[pymethods]
impl PySdpResult {
    fn __repr__(&self) -> String {
        format!("SdpResult(value={}, status={}, iterations={})", self.value, self.status, self.iterations)
    }
}

/// Primes p ≡ 1 (mod 4) in [lo, hi].
#[pyfunction]
fn primes_one_mod_four(lo: u64, hi: u64) -> Vec<u64> {
    field::primes_one_mod_four(lo, hi)
}

/// The Hoffman bound √p and the Hansen–Podolskii bound.
#[pyfunction]
fn classical_bounds(p: u64) -> (f64, f64) {
    let b = paley::classical_bounds(p);
    (b.hoffman, b.hansen_podolskii)
}

/// Computes a sweep quantity (same grammar as the CLI `--quantity`) at p.
#[pyfunction]
fn compute_quantity(quantity: &str, p: u64) -> PyResult<f64> {
    let q: Quantity = quantity.parse().map_err(to_py)?;
    Ok(harness::compute_quantity(q, p).map_err(to_py)?.value)
}

/// Least-squares fit value ≈ a·p^b in log-log space; returns (a, b, r²).
#[pyfunction]
fn fit_power_law(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let f = harness::fit_points(&points).map_err(to_py)?;
    Ok((f.a, f.b, f.r_squared))
}

#[pymodule]
fn paley_sos_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPaleyGraph>()?;
    m.add_class::<PySdpResult>()?;
    m.add_function(wrap_pyfunction!(primes_one_mod_four, m)?)?;
    m.add_function(wrap_pyfunction!(classical_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(compute_quantity, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    Ok(())
}
