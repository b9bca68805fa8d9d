//! Python bindings for the rigidity library.
//!
//! Matrices cross the boundary as nested lists of Python complex numbers
//! (row-major, square). Results come back as plain dicts and lists so no
//! wrapper classes are needed on the Python side.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use rigidity_core::ep::{self, EpReportOptions};
use rigidity_core::linalg::Matrix;
use rigidity_core::models;
use rigidity_core::spectral;

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<Matrix> {
    let dim = rows.len();
    if dim == 0 {
        return Err(PyValueError::new_err("matrix must be non-empty"));
    }
    let mut m = Matrix::zeros(dim);
    for (k, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(PyValueError::new_err(format!(
                "row {k} has {} entries, expected {dim}",
                row.len()
            )));
        }
        for (l, &z) in row.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(PyValueError::new_err(format!("non-finite entry at ({k},{l})")));
            }
            m[(k, l)] = z;
        }
    }
    Ok(m)
}

fn from_matrix(py: Python<'_>, m: &Matrix) -> PyObject {
    let rows: Vec<Vec<Complex64>> = (0..m.dim())
        .map(|k| (0..m.dim()).map(|l| m[(k, l)]).collect())
        .collect();
    rows.into_py(py)
}

fn run_err(e: rigidity_core::Error) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Eigenvalues, biorthogonal vectors, phase rigidities and Petermann
/// factors. Returns a list of dicts, one per eigenvalue.
#[pyfunction]
fn eigensystem(py: Python<'_>, matrix: Vec<Vec<Complex64>>) -> PyResult<PyObject> {
    let h = to_matrix(matrix)?;
    let sys = spectral::eigensystem(&h).map_err(run_err)?;
    let out = PyList::empty_bound(py);
    for pair in &sys.pairs {
        let d = PyDict::new_bound(py);
        d.set_item("omega", pair.value)?;
        d.set_item("right", pair.right.clone())?;
        d.set_item("left", pair.left.clone())?;
        d.set_item("rigidity", pair.rigidity)?;
        d.set_item("rigidity_exact", pair.rigidity_exact)?;
        d.set_item("route_disagreement", pair.route_disagreement)?;
        d.set_item("petermann", pair.petermann)?;
        out.append(d)?;
    }
    Ok(out.into())
}

/// Phase rigidity of every eigenstate, as a list of complex numbers.
#[pyfunction]
fn rigidity(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    let h = to_matrix(matrix)?;
    let sys = spectral::eigensystem(&h).map_err(run_err)?;
    Ok(sys.pairs.iter().map(|p| p.rigidity).collect())
}

/// Petermann factor K = |r|^-2 of every eigenstate.
#[pyfunction]
fn petermann(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let h = to_matrix(matrix)?;
    let sys = spectral::eigensystem(&h).map_err(run_err)?;
    Ok(sys.pairs.iter().map(|p| p.petermann).collect())
}

/// Full exceptional-point report.
///
/// `h_at_ep` (the matrix exactly at the EP) unlocks the equipartition
/// diagnostics; without it only clustering and asymptotes are reported.
#[pyfunction]
#[pyo3(signature = (matrix, h_at_ep=None, cluster_tol=None, identity_tol=1e-8, truncated=false))]
fn ep_report(
    py: Python<'_>,
    matrix: Vec<Vec<Complex64>>,
    h_at_ep: Option<Vec<Vec<Complex64>>>,
    cluster_tol: Option<f64>,
    identity_tol: f64,
    truncated: bool,
) -> PyResult<PyObject> {
    let h = to_matrix(matrix)?;
    let h_ep = h_at_ep.map(to_matrix).transpose()?;
    let scale = 1.0 + h.max_row_norm();
    let opts = EpReportOptions {
        cluster_tol: cluster_tol.unwrap_or(1e-3 * scale),
        identity_tol,
        truncated,
    };
    let report = ep::ep_report(&h, h_ep.as_ref(), &opts).map_err(run_err)?;

    let pairs = PyList::empty_bound(py);
    for p in &report.eigensystem.pairs {
        let d = PyDict::new_bound(py);
        d.set_item("omega", p.value)?;
        d.set_item("rigidity", p.rigidity)?;
        d.set_item("petermann", p.petermann)?;
        d.set_item("route_disagreement", p.route_disagreement)?;
        pairs.append(d)?;
    }
    let clusters = PyList::empty_bound(py);
    for cl in &report.clusters {
        let d = PyDict::new_bound(py);
        d.set_item("center", cl.cluster.center)?;
        d.set_item("order", cl.cluster.order)?;
        d.set_item("indices", cl.cluster.indices.clone())?;
        d.set_item("xi", cl.cluster.xi)?;
        d.set_item("minor_denominator", cl.cluster.minor_denominator)?;
        let states = PyList::empty_bound(py);
        for st in &cl.per_state {
            let s = PyDict::new_bound(py);
            s.set_item("index", st.index)?;
            s.set_item("rigidity_abs", st.rigidity_abs)?;
            s.set_item("predicted_truncated", st.predicted_truncated)?;
            s.set_item("predicted_general", st.predicted_general)?;
            s.set_item("ratio_general", st.ratio_general)?;
            s.set_item("equipartition_deviation", st.equipartition_deviation)?;
            states.append(s)?;
        }
        d.set_item("states", states)?;
        clusters.append(d)?;
    }
    let doc = PyDict::new_bound(py);
    doc.set_item("eigenpairs", pairs)?;
    doc.set_item("ep_clusters", clusters)?;
    Ok(doc.into())
}

fn model_dict(py: Python<'_>, model: &models::NearEPModel) -> PyResult<PyObject> {
    let d = PyDict::new_bound(py);
    d.set_item("h_at_ep", from_matrix(py, &model.h_at_ep))?;
    d.set_item("h_prime", from_matrix(py, &model.h_prime))?;
    d.set_item("omega_ep", model.omega_ep)?;
    d.set_item("order", model.order)?;
    d.set_item("truncated", model.truncated)?;
    Ok(d.into())
}

/// Pure Jordan block of order `n` at `omega`.
#[pyfunction]
#[pyo3(signature = (n, omega=Complex64::new(0.0, 0.0)))]
fn jordan_block(py: Python<'_>, n: usize, omega: Complex64) -> PyResult<PyObject> {
    model_dict(py, &models::jordan_block(n, omega).map_err(run_err)?)
}

/// Random dense model with an embedded order-`n` EP among `m` states.
#[pyfunction]
#[pyo3(signature = (m, n, seed=42, spread=2.5))]
fn random_near_ep(py: Python<'_>, m: usize, n: usize, seed: u64, spread: f64) -> PyResult<PyObject> {
    model_dict(py, &models::random_near_ep(m, n, seed, spread).map_err(run_err)?)
}

/// The 4x4 example family with two order-2 EPs, at its default parameters.
#[pyfunction]
fn example_4x4(py: Python<'_>) -> PyResult<PyObject> {
    let (_, params) = models::example_4x4_default();
    model_dict(py, &models::example_4x4(&params).map_err(run_err)?)
}

/// Detuned matrix H(eps) = H_EP + eps * H' of a model dict.
#[pyfunction]
fn model_at(
    py: Python<'_>,
    h_at_ep: Vec<Vec<Complex64>>,
    h_prime: Vec<Vec<Complex64>>,
    eps: f64,
) -> PyResult<PyObject> {
    let h = to_matrix(h_at_ep)?;
    let hp = to_matrix(h_prime)?;
    if h.dim() != hp.dim() {
        return Err(PyValueError::new_err("h_at_ep and h_prime dimensions differ"));
    }
    let mut out = h.clone();
    for k in 0..h.dim() {
        for l in 0..h.dim() {
            out[(k, l)] += eps * hp[(k, l)];
        }
    }
    Ok(from_matrix(py, &out))
}

#[pymodule]
fn rigidity_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(eigensystem, m)?)?;
    m.add_function(wrap_pyfunction!(rigidity, m)?)?;
    m.add_function(wrap_pyfunction!(petermann, m)?)?;
    m.add_function(wrap_pyfunction!(ep_report, m)?)?;
    m.add_function(wrap_pyfunction!(jordan_block, m)?)?;
    m.add_function(wrap_pyfunction!(random_near_ep, m)?)?;
    m.add_function(wrap_pyfunction!(example_4x4, m)?)?;
    m.add_function(wrap_pyfunction!(model_at, m)?)?;
    Ok(())
}
