//! Python bindings: thin wrappers over the multipole crate. Polynomials
//! cross the boundary as expression strings, vectors as Python complex
//! triples, everything else as plain dicts and lists.

use multipole::conic::ProjPoint;
use multipole::decompose::{self, Policy};
use multipole::harmonic;
use multipole::maxwell;
use multipole::parcelling;
use multipole::poly::Poly;
use multipole::quadrature;
use multipole::ramification;
use multipole::{format_poly, parse_poly, Complex64, QuadForm, Tolerances};
use nalgebra::Vector3;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

/// A complex 3-vector as a Python triple.
type PyVec3 = (Complex64, Complex64, Complex64);

fn err(e: multipole::Error) -> PyErr {
    PyValueError::new_err(format!("{} ({})", e, e.code()))
}

fn parse(text: &str) -> PyResult<Poly> {
    parse_poly(text).map_err(err)
}

fn vec3_from(py_v: [Complex64; 3]) -> Vector3<Complex64> {
    Vector3::new(py_v[0], py_v[1], py_v[2])
}

fn vec3_to(v: &Vector3<Complex64>) -> PyVec3 {
    (v[0], v[1], v[2])
}

/// A validated quadratic form `Q` and the surface `{Q = 1}`.
#[pyclass(frozen)]
struct Surface {
    q: QuadForm,
}

#[pymethods]
impl Surface {
    /// Build from a polynomial expression, e.g. ``Surface("x^2+y^2+z^2")``.
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        let p = parse(expr)?;
        let h = match p.parts() {
            [one] if one.degree() == 2 => one.clone(),
            _ => {
                return Err(PyValueError::new_err(
                    "the quadratic form must be homogeneous of degree 2",
                ))
            }
        };
        Ok(Surface {
            q: QuadForm::from_hpoly(&h).map_err(err)?,
        })
    }

    /// Build from the six upper-triangle entries [b00, b01, b02, b11, b12, b22].
    #[staticmethod]
    fn from_upper_triangle(entries: [Complex64; 6]) -> PyResult<Self> {
        Ok(Surface {
            q: QuadForm::from_upper_triangle(&entries).map_err(err)?,
        })
    }

    fn upper_triangle(&self) -> [Complex64; 6] {
        self.q.upper_triangle()
    }

    fn is_real(&self) -> bool {
        self.q.is_real()
    }

    fn is_positive_definite(&self) -> bool {
        self.q.is_positive_definite()
    }

    /// Apply `Δ_Q` to a polynomial expression.
    fn laplacian(&self, poly: &str) -> PyResult<String> {
        let p = parse(poly)?;
        let mut out = Poly::zero();
        for h in p.parts() {
            out.add_hpoly_in_place(&self.q.laplacian(h));
        }
        Ok(format_poly(&out))
    }

    /// Evaluate `Q` at a complex 3-vector.
    fn eval(&self, v: [Complex64; 3]) -> Complex64 {
        self.q.eval(&vec3_from(v))
    }

    fn __repr__(&self) -> String {
        format!(
            "Surface({:?})",
            format_poly(&Poly::from_hpoly(self.q.as_hpoly()))
        )
    }
}

fn surface_from(expr: Option<&str>) -> PyResult<QuadForm> {
    let text = expr.unwrap_or("x^2+y^2+z^2");
    Surface::new(text).map(|s| s.q)
}

fn multipole_dict<'py>(py: Python<'py>, w: &decompose::Multipole) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("degree", w.degree())?;
    d.set_item("lambda", w.lambda)?;
    let vectors: Vec<PyVec3> = w.vectors.iter().map(vec3_to).collect();
    d.set_item("vectors", vectors)?;
    Ok(d)
}

/// The multipole sequence of a polynomial on `{Q = 1}`.
#[pyclass(frozen)]
struct Decomposition {
    inner: decompose::Decomposition,
}

#[pymethods]
impl Decomposition {
    #[getter]
    fn unique(&self) -> bool {
        self.inner.unique
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    /// List of ``{"degree", "lambda", "vectors"}`` dicts, one per degree
    /// (zero multipoles have an empty vector list and λ = 0).
    fn multipoles<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let items: PyResult<Vec<_>> = self
            .inner
            .multipoles
            .iter()
            .map(|w| multipole_dict(py, w))
            .collect();
        PyList::new(py, items?)
    }

    /// Evaluate `Σ scaleᵏ·λ_k·Π⟨v, ·⟩` at a surface point.
    #[pyo3(signature = (point, scale = Complex64::new(1.0, 0.0)))]
    fn evaluate(&self, point: [Complex64; 3], scale: Complex64) -> PyResult<Complex64> {
        self.inner.evaluate(&vec3_from(point), scale).map_err(err)
    }

    /// The represented polynomial as an expression string.
    fn expand(&self) -> String {
        format_poly(&self.inner.expand())
    }
}

/// Decompose a polynomial on `{Q = 1}` into multipoles.
#[pyfunction]
#[pyo3(signature = (poly, quadform = None, policy = "real", cluster_tol = None))]
fn decompose_poly(
    poly: &str,
    quadform: Option<&str>,
    policy: &str,
    cluster_tol: Option<f64>,
) -> PyResult<Decomposition> {
    let q = surface_from(quadform)?;
    let p = parse(poly)?;
    let pol = match policy {
        "real" => Policy::Real,
        "complex" => Policy::Complex,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown policy {other:?}: use 'real' or 'complex'"
            )))
        }
    };
    let mut tols = Tolerances::default();
    if let Some(c) = cluster_tol {
        tols.cluster_tol = c;
    }
    Ok(Decomposition {
        inner: decompose::decompose(&p, &q, pol, &tols).map_err(err)?,
    })
}

/// All leading multipoles of a homogeneous polynomial, as dicts.
#[pyfunction]
#[pyo3(signature = (poly, quadform = None, cap = 10_000))]
fn enumerate_leading_multipoles<'py>(
    py: Python<'py>,
    poly: &str,
    quadform: Option<&str>,
    cap: u128,
) -> PyResult<Bound<'py, PyList>> {
    let q = surface_from(quadform)?;
    let p = parse(poly)?;
    let h = match p.parts() {
        [one] => one.clone(),
        _ => return Err(PyValueError::new_err("expected a homogeneous polynomial")),
    };
    let all =
        decompose::enumerate_decompositions(&h, &q, cap, &Tolerances::default()).map_err(err)?;
    let items: PyResult<Vec<_>> = all.iter().map(|w| multipole_dict(py, w)).collect();
    PyList::new(py, items?)
}

/// Q-harmonic components of a homogeneous polynomial:
/// list of ``(degree, expression)`` pairs, highest degree first.
#[pyfunction]
#[pyo3(signature = (poly, quadform = None))]
fn harmonic_components(poly: &str, quadform: Option<&str>) -> PyResult<Vec<(usize, String)>> {
    let q = surface_from(quadform)?;
    let p = parse(poly)?;
    let h = match p.parts() {
        [one] => one.clone(),
        _ => return Err(PyValueError::new_err("expected a homogeneous polynomial")),
    };
    let dec = harmonic::harmonic_decompose(&h, &q).map_err(err)?;
    Ok(dec
        .components()
        .map(|(k, f)| (k, format_poly(&Poly::from_hpoly(f.clone()))))
        .collect())
}

/// Solve `{Δ_Q P = M, P|_S = N|_S}`; returns the solution expression.
#[pyfunction]
#[pyo3(signature = (laplacian, boundary, quadform = None))]
fn dirichlet_solve(laplacian: &str, boundary: &str, quadform: Option<&str>) -> PyResult<String> {
    let q = surface_from(quadform)?;
    let m = parse(laplacian)?;
    let n = parse(boundary)?;
    let p = harmonic::dirichlet_solve(&m, &n, &q).map_err(err)?;
    Ok(format_poly(&p))
}

/// Apply directional derivatives to the `Q`-potential: the harmonic
/// numerator polynomial as an expression.
#[pyfunction]
#[pyo3(signature = (dirs, quadform = None))]
fn maxwell_apply(dirs: Vec<[Complex64; 3]>, quadform: Option<&str>) -> PyResult<String> {
    let q = surface_from(quadform)?;
    let dirs: Vec<Vector3<Complex64>> = dirs.into_iter().map(vec3_from).collect();
    Ok(format_poly(&Poly::from_hpoly(maxwell::maxwell_apply(
        &q, &dirs,
    ))))
}

/// Maxwell directions and scalar for a harmonic polynomial:
/// ``(dirs, lambda, certificate)``.
#[pyfunction]
#[pyo3(signature = (poly, quadform = None))]
fn maxwell_represent(
    poly: &str,
    quadform: Option<&str>,
) -> PyResult<(Vec<PyVec3>, Complex64, f64)> {
    let q = surface_from(quadform)?;
    let p = parse(poly)?;
    let h = match p.parts() {
        [one] => one.clone(),
        _ => return Err(PyValueError::new_err("expected a homogeneous polynomial")),
    };
    let rep = maxwell::maxwell_from_harmonic(&h, &q, &Tolerances::default()).map_err(err)?;
    Ok((
        rep.dirs.iter().map(vec3_to).collect(),
        rep.lambda,
        rep.distance,
    ))
}

/// `(2d−1)!!`, the pairing count of `2d` simple points.
#[pyfunction]
fn kappa(d: u32) -> PyResult<u64> {
    parcelling::kappa(d).map_err(err)
}

/// Number of generalized parcellings of a multiplicity list.
#[pyfunction]
fn count_parcellings(mults: Vec<u32>) -> PyResult<u128> {
    let mu = parcelling::MultiplicityFn::new(mults).map_err(err)?;
    Ok(parcelling::count_parcellings(&mu))
}

/// All generalized parcellings as lists of index pairs.
#[pyfunction]
fn enumerate_parcellings(mults: Vec<u32>) -> PyResult<Vec<Vec<(usize, usize)>>> {
    let mu = parcelling::MultiplicityFn::new(mults).map_err(err)?;
    Ok(parcelling::enumerate_parcellings(&mu)
        .map_err(err)?
        .into_iter()
        .map(|p| p.parcels().to_vec())
        .collect())
}

/// Does the line set meet the conic with a multiple point? Returns
/// ``(flag, witness)`` with the witness as a normalized ``(u0, u1)`` pair.
#[pyfunction]
#[pyo3(signature = (forms, quadform = None))]
fn is_ramified(
    forms: Vec<String>,
    quadform: Option<&str>,
) -> PyResult<(bool, Option<(Complex64, Complex64)>)> {
    let q = surface_from(quadform)?;
    let lines = parse_lines(&forms)?;
    let (flag, witness) =
        ramification::is_ramified(&lines, &q, &Tolerances::default()).map_err(err)?;
    Ok((flag, witness.map(|p: ProjPoint| (p.u0, p.u1))))
}

fn parse_lines(forms: &[String]) -> PyResult<Vec<Vector3<Complex64>>> {
    forms
        .iter()
        .map(|f| {
            let p = parse(f)?;
            match p.parts() {
                [one] if one.degree() == 1 => Ok(Vector3::new(
                    one.coeffs()[0],
                    one.coeffs()[1],
                    one.coeffs()[2],
                )),
                _ => Err(PyValueError::new_err(format!("{f:?} is not a linear form"))),
            }
        })
        .collect()
}

/// Dimension of non-obvious first-order deformations of a factored set.
#[pyfunction]
#[pyo3(signature = (forms, quadform = None))]
fn tangent_nullity(forms: Vec<String>, quadform: Option<&str>) -> PyResult<usize> {
    let q = surface_from(quadform)?;
    let lines = parse_lines(&forms)?;
    ramification::tangent_nullity(&lines, &q, &Tolerances::default()).map_err(err)
}

/// Dimension defect of factorizations subordinate to a partition on a
/// degree-`l` surface.
#[pyfunction]
fn dim_defect(l: u32, partition: Vec<u32>) -> PyResult<i64> {
    ramification::dim_defect(l, &partition).map_err(err)
}

/// Per-degree Fourier rows ``(degree, expression, energy)`` plus the
/// Parseval residual.
type FourierResult = (Vec<(usize, String, f64)>, f64);

/// Fourier components on `{Q = 1}`: list of ``(degree, expression,
/// energy)`` plus the Parseval residual.
#[pyfunction]
#[pyo3(signature = (poly, quadform = None, kmax = 6))]
fn fourier(
    poly: &str,
    quadform: Option<&str>,
    kmax: usize,
) -> PyResult<FourierResult> {
    let q = surface_from(quadform)?;
    let p = parse(poly)?;
    let grid = quadrature::SurfaceGrid::new(&q, kmax + 2);
    let values = grid.values_of_poly(&p);
    let rep = quadrature::fourier_components(&values, &q, kmax, &grid).map_err(err)?;
    Ok((
        rep.components
            .iter()
            .map(|c| {
                (
                    c.degree,
                    format_poly(&Poly::from_hpoly(c.component.clone())),
                    c.energy,
                )
            })
            .collect(),
        rep.parseval_residual,
    ))
}

/// Parse and reformat an expression in canonical graded-lex order.
#[pyfunction]
fn canonical_form(poly: &str) -> PyResult<String> {
    Ok(format_poly(&parse(poly)?))
}

#[pymodule]
fn multipole_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Surface>()?;
    m.add_class::<Decomposition>()?;
    m.add_function(wrap_pyfunction!(decompose_poly, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_leading_multipoles, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_components, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_solve, m)?)?;
    m.add_function(wrap_pyfunction!(maxwell_apply, m)?)?;
    m.add_function(wrap_pyfunction!(maxwell_represent, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(count_parcellings, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_parcellings, m)?)?;
    m.add_function(wrap_pyfunction!(is_ramified, m)?)?;
    m.add_function(wrap_pyfunction!(tangent_nullity, m)?)?;
    m.add_function(wrap_pyfunction!(dim_defect, m)?)?;
    m.add_function(wrap_pyfunction!(fourier, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_form, m)?)?;
    Ok(())
}
