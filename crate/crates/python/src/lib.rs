//! Python bindings. Points are `(x, y)` tuples and angles are unit complex
//! numbers; matrices are lists of rows.

use num_complex::Complex64;
use planar_geodesy as core;
use planar_geodesy::ambiguity::{self, DEGENERACY_TOL};
use planar_geodesy::reconstruct;
use planar_geodesy::{DirectedAngleMatrix, DoubleAngle, DoubleAngleMatrix, PlanarPoint};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(planar_geodesy, GeodesyError, PyValueError, "Raised when a geometric operation fails.");

type Point = (f64, f64);

fn err(e: core::Error) -> PyErr {
    GeodesyError::new_err(e.to_string())
}

fn pt(p: Point) -> PlanarPoint {
    PlanarPoint::new(p.0, p.1)
}

fn tup(p: &PlanarPoint) -> Point {
    (p.x, p.y)
}

fn pts(ps: &[Point]) -> Vec<PlanarPoint> {
    ps.iter().copied().map(pt).collect()
}

fn quad(ps: &[Point]) -> PyResult<[PlanarPoint; 4]> {
    <[Point; 4]>::try_from(ps)
        .map(|q| q.map(pt))
        .map_err(|_| GeodesyError::new_err(format!("expected 4 vertices, got {}", ps.len())))
}

fn double(rows: Vec<Vec<Complex64>>) -> PyResult<DoubleAngleMatrix> {
    DoubleAngleMatrix::from_rows(&rows).map_err(err)
}

/// Targets and measure points.
#[pyclass(name = "Configuration", module = "planar_geodesy", from_py_object)]
#[derive(Clone)]
struct PyConfiguration {
    inner: core::Configuration,
}

#[pymethods]
impl PyConfiguration {
    #[new]
    fn new(targets: Vec<Point>, measures: Vec<Point>) -> PyResult<Self> {
        Ok(Self { inner: core::Configuration::new(pts(&targets), pts(&measures)).map_err(err)? })
    }

    #[getter]
    fn targets(&self) -> Vec<Point> {
        self.inner.targets.iter().map(tup).collect()
    }

    #[getter]
    fn measures(&self) -> Vec<Point> {
        self.inner.measures.iter().map(tup).collect()
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    /// `M[j][i] = ∠_{q_j}(p_1, p_{i+2})²`.
    fn double_angle_matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(core::double_angle_matrix(&self.inner).map_err(err)?.rows_complex())
    }

    fn directed_angle_matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(core::directed_angle_matrix(&self.inner).map_err(err)?.rows_complex())
    }

    /// Degeneracy flags as readable strings.
    #[pyo3(signature = (tol = DEGENERACY_TOL))]
    fn degeneracy_flags(&self, tol: f64) -> Vec<String> {
        ambiguity::degeneracy_flags(&self.inner, tol).iter().map(ToString::to_string).collect()
    }

    fn __repr__(&self) -> String {
        format!("Configuration(targets={:?}, measures={:?})", self.targets(), self.measures())
    }
}

/// Output of [`solve`].
#[pyclass(name = "SolutionSet", module = "planar_geodesy", get_all, skip_from_py_object)]
struct PySolutionSet {
    /// `"unique"`, `"twin-pair"`, `"infinite"` or `"degenerate-ambiguous"`.
    kind: String,
    branch: String,
    solutions: Vec<PyConfiguration>,
    residuals: Vec<f64>,
    flags: Vec<String>,
    reasons: Vec<String>,
    numeric_clusters: Option<usize>,
}

#[pymethods]
impl PySolutionSet {
    fn __len__(&self) -> usize {
        self.solutions.len()
    }

    fn __repr__(&self) -> String {
        format!("SolutionSet(kind={:?}, branch={:?}, solutions={})", self.kind, self.branch, self.solutions.len())
    }
}

#[pyfunction]
fn double_angle(q: Point, p1: Point, p2: Point) -> PyResult<Complex64> {
    Ok(core::double_angle(&pt(q), &pt(p1), &pt(p2)).map_err(err)?.value())
}

#[pyfunction]
fn double_angle_matrix(targets: Vec<Point>, measures: Vec<Point>) -> PyResult<Vec<Vec<Complex64>>> {
    PyConfiguration::new(targets, measures)?.double_angle_matrix()
}

/// Configurations reproducing a double angle matrix, in the frame
/// `p_1 = (0, 0)`, `p_2 = (1, 0)`.
#[pyfunction]
#[pyo3(signature = (matrix, directed = None, restarts = 64, seed = 0, tol = 1e-6))]
fn solve(
    py: Python<'_>,
    matrix: Vec<Vec<Complex64>>,
    directed: Option<Vec<Vec<Complex64>>>,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> PyResult<PySolutionSet> {
    let m = double(matrix)?;
    let d = directed.map(|rows| DirectedAngleMatrix::from_rows(&rows)).transpose().map_err(err)?;
    let opts = core::SolveOptions { restarts, seed, tol };
    let (set, report) = py.detach(|| core::solve(&m, d.as_ref(), &opts)).map_err(err)?;
    Ok(PySolutionSet {
        kind: set.kind.to_string(),
        branch: report.branch.name().to_string(),
        solutions: set.solutions.into_iter().map(|inner| PyConfiguration { inner }).collect(),
        residuals: set.diagnostics.residuals,
        flags: set.diagnostics.flags.iter().map(ToString::to_string).collect(),
        reasons: set.diagnostics.reasons,
        numeric_clusters: report.numeric_clusters,
    })
}

/// Distinct numeric solutions from seeded random restarts.
#[pyfunction]
#[pyo3(signature = (matrix, restarts = 64, seed = 0))]
fn enumerate_numeric(py: Python<'_>, matrix: Vec<Vec<Complex64>>, restarts: usize, seed: u64) -> PyResult<Vec<PyConfiguration>> {
    let m = double(matrix)?;
    let found = py.detach(|| reconstruct::enumerate_numeric(&m, restarts, seed));
    Ok(found.into_iter().map(|inner| PyConfiguration { inner }).collect())
}

/// Measure point from three targets and the double angles `∠(p1,p2)²`, `∠(p1,p3)²`.
#[pyfunction]
fn resect(p1: Point, p2: Point, p3: Point, d12: Complex64, d13: Complex64) -> PyResult<Point> {
    let d12 = DoubleAngle::new(d12).map_err(err)?;
    let d13 = DoubleAngle::new(d13).map_err(err)?;
    Ok(tup(&reconstruct::resect(&pt(p1), &pt(p2), &pt(p3), d12, d13).map_err(err)?))
}

#[pyfunction]
fn twin_quadrilateral(vertices: Vec<Point>) -> PyResult<Vec<Point>> {
    Ok(reconstruct::twin_quadrilateral(&quad(&vertices)?).map_err(err)?.iter().map(tup).collect())
}

/// Image of `q` under the twin map from `quad` to `twin`.
#[pyfunction]
fn twin_map(q: Point, quad_vertices: Vec<Point>, twin: Vec<Point>) -> PyResult<Point> {
    Ok(tup(&ambiguity::twin_map(&pt(q), &quad(&quad_vertices)?, &quad(&twin)?).map_err(err)?))
}

/// `±1` sign relating directed angles at `q` and at its twin image.
#[pyfunction]
fn direction_sign(q: Point, quad_vertices: Vec<Point>, twin: Vec<Point>, i: usize) -> PyResult<i8> {
    Ok(ambiguity::direction_sign(&pt(q), &quad(&quad_vertices)?, &quad(&twin)?, i).map_err(err)?.0)
}

/// Inside/outside pattern of `q` against the four fundamental circles.
#[pyfunction]
fn region_signature(q: Point, quad_vertices: Vec<Point>) -> PyResult<[bool; 4]> {
    let fc = ambiguity::fundamental_circles(&quad(&quad_vertices)?).map_err(err)?;
    Ok(fc.signature(&pt(q)).map_err(err)?.0)
}

/// Region signatures found on an `n × n` grid, sorted.
#[pyfunction]
#[pyo3(signature = (quad_vertices, n = 200))]
fn region_signatures(quad_vertices: Vec<Point>, n: usize) -> PyResult<Vec<[bool; 4]>> {
    let fc = ambiguity::fundamental_circles(&quad(&quad_vertices)?).map_err(err)?;
    Ok(fc.realized_signatures(n).into_iter().map(|s| s.0).collect())
}

#[pyfunction]
fn is_convex(quad_vertices: Vec<Point>) -> PyResult<bool> {
    Ok(ambiguity::is_convex(&quad(&quad_vertices)?))
}

/// Least-squares similarity `z ↦ a·z + b` (or `a·z̄ + b`) taking `source`
/// onto `target`: returns `(a, b, mirrored, rms)`.
#[pyfunction]
#[pyo3(signature = (source, target, allow_mirror = false))]
fn align_similarity(source: Vec<Point>, target: Vec<Point>, allow_mirror: bool) -> PyResult<(Complex64, Complex64, bool, f64)> {
    let (s, rms) = core::align_similarity(&pts(&source), &pts(&target), allow_mirror).map_err(err)?;
    Ok((s.scale_rotation, s.translation, s.mirrored, rms))
}

/// Dimension of the space of quadrics through the profile points of targets
/// `tuple` (1 for a unique profile).
#[pyfunction]
#[pyo3(signature = (matrix, tuple = (0, 1, 2, 3)))]
fn profile_dimension(matrix: Vec<Vec<Complex64>>, tuple: (usize, usize, usize, usize)) -> PyResult<usize> {
    let m = double(matrix)?;
    let (a, b, c, d) = tuple;
    Ok(core::profile::interpolate_tuple_profile(&m, [a, b, c, d]).map_err(err)?.dimension)
}

#[pymodule]
#[pyo3(name = "planar_geodesy")]
fn planar_geodesy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GeodesyError", m.py().get_type::<GeodesyError>())?;
    m.add_class::<PyConfiguration>()?;
    m.add_class::<PySolutionSet>()?;
    m.add_function(wrap_pyfunction!(double_angle, m)?)?;
    m.add_function(wrap_pyfunction!(double_angle_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(resect, m)?)?;
    m.add_function(wrap_pyfunction!(twin_quadrilateral, m)?)?;
    m.add_function(wrap_pyfunction!(twin_map, m)?)?;
    m.add_function(wrap_pyfunction!(direction_sign, m)?)?;
    m.add_function(wrap_pyfunction!(region_signature, m)?)?;
    m.add_function(wrap_pyfunction!(region_signatures, m)?)?;
    m.add_function(wrap_pyfunction!(is_convex, m)?)?;
    m.add_function(wrap_pyfunction!(align_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(profile_dimension, m)?)?;
    Ok(())
}
