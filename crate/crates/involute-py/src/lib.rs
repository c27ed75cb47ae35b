//! Python bindings: a thin layer over the exact engine. Surfaces cross the
//! boundary as a wrapped handle; every report crosses as a canonical JSON
//! string so Python sees exactly what the CLI emits; exact rationals are
//! written as `[numerator, denominator]` decimal strings.

use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use involute::error::Error;
use involute::involution::pair_from_surface;
use involute::linearized::divergence_certificate;
use involute::normalform::{normalize_pair, perturb_to_large_coeffs};
use involute::report::{certificate_to_csv, certificate_to_json, to_canonical_string};
use involute::scalar::{parse_rational, rational_pair, BernoulliTable};
use involute::surface as sf;

/// Input mistakes become `ValueError`; broken internal invariants become
/// `RuntimeError` (those always indicate a bug in the engine).
fn to_py_err(e: Error) -> PyErr {
    match &e {
        Error::InvalidInput(_)
        | Error::ThresholdUnachievable { .. }
        | Error::Io(_)
        | Error::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_eps(text: &str) -> PyResult<BigRational> {
    parse_rational(text).map_err(to_py_err)
}

/// A defining coefficient family (the exact data of one surface germ).
#[pyclass(frozen)]
struct Surface {
    inner: sf::Surface,
}

#[pymethods]
impl Surface {
    /// The zero surface at the given truncation degree and scale.
    #[staticmethod]
    #[pyo3(signature = (degree, epsilon = "1"))]
    fn zero(degree: usize, epsilon: &str) -> PyResult<Self> {
        if degree < 4 {
            return Err(PyValueError::new_err("degree must be at least 4"));
        }
        Ok(Surface {
            inner: sf::Surface::zero(degree, parse_eps(epsilon)?),
        })
    }

    /// The canonical divergent family truncated at the given degree.
    #[staticmethod]
    #[pyo3(signature = (degree, epsilon = "1"))]
    fn family(degree: usize, epsilon: &str) -> PyResult<Self> {
        if degree < 4 {
            return Err(PyValueError::new_err("degree must be at least 4"));
        }
        Ok(Surface {
            inner: sf::r_star(degree, &parse_eps(epsilon)?),
        })
    }

    /// The single generator of the given total degree (zero at degree 4).
    #[staticmethod]
    #[pyo3(signature = (degree, epsilon = "1"))]
    fn generator(degree: usize, epsilon: &str) -> PyResult<Self> {
        if degree < 4 {
            return Err(PyValueError::new_err("degree must be at least 4"));
        }
        Ok(Surface {
            inner: sf::generator_by_degree(degree, &parse_eps(epsilon)?),
        })
    }

    /// Parse the JSON surface format used by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Surface {
            inner: sf::Surface::from_json_str(text).map_err(to_py_err)?,
        })
    }

    /// Serialize to the same canonical JSON the command-line tool reads.
    fn to_json(&self) -> String {
        to_canonical_string(&self.inner.to_json_value())
    }

    /// All structural violations, as human-readable strings (empty if valid).
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    fn is_valid(&self) -> bool {
        self.inner.is_valid()
    }

    #[getter]
    fn trunc(&self) -> usize {
        self.inner.trunc()
    }

    #[getter]
    fn epsilon(&self) -> [String; 2] {
        rational_pair(self.inner.epsilon())
    }

    /// Coefficient-root distance to another surface (float estimate; the
    /// engine's exact comparisons never use floats).
    fn metric_distance(&self, other: &Surface) -> f64 {
        sf::metric_d(&self.inner, &other.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Surface(trunc={}, terms={})",
            self.inner.trunc(),
            self.inner.term_count()
        )
    }
}

/// Extract the involution pair of a valid surface to the given degree,
/// certify it, and return the full report as canonical JSON.
#[pyfunction]
fn involution_pair(surface: &Surface, degree: usize) -> PyResult<String> {
    let pair = pair_from_surface(&surface.inner, degree).map_err(to_py_err)?;
    Ok(to_canonical_string(&pair.to_json_value()))
}

/// Compute the unique normalized transform conjugating the surface's
/// involution pair to its linear models; canonical JSON.
#[pyfunction]
fn normalize(surface: &Surface, degree: usize) -> PyResult<String> {
    let pair = pair_from_surface(&surface.inner, degree).map_err(to_py_err)?;
    let nt = normalize_pair(&pair, degree).map_err(to_py_err)?;
    Ok(to_canonical_string(&nt.to_json_value()))
}

/// Run the two-route divergence certificate for the canonical family;
/// returns the JSON report (or CSV with `csv=True`).
#[pyfunction]
#[pyo3(signature = (degree, epsilon = "1", csv = false))]
fn certify_divergence(degree: usize, epsilon: &str, csv: bool) -> PyResult<String> {
    let cert = divergence_certificate(degree, &parse_eps(epsilon)?).map_err(to_py_err)?;
    Ok(if csv {
        certificate_to_csv(&cert)
    } else {
        to_canonical_string(&certificate_to_json(&cert))
    })
}

/// Staged coefficient-growth search from a base surface; raises
/// `ValueError` naming the failing degree when a stage threshold is
/// unachievable.
#[pyfunction]
fn perturb(base: &Surface, stages: Vec<usize>) -> PyResult<Surface> {
    if stages.is_empty() {
        return Err(PyValueError::new_err(
            "at least one stage degree is required",
        ));
    }
    let found = perturb_to_large_coeffs(&base.inner, &stages).map_err(to_py_err)?;
    Ok(Surface { inner: found })
}

/// The first `max_k + 1` coefficients of `z / (e^z - 1)` as exact
/// `[numerator, denominator]` string pairs.
#[pyfunction]
fn bernoulli(max_k: usize) -> Vec<[String; 2]> {
    let table = BernoulliTable::new(max_k);
    table.betas().iter().map(rational_pair).collect()
}

#[pymodule]
fn involute_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Surface>()?;
    m.add_function(wrap_pyfunction!(involution_pair, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(certify_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(perturb, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli, m)?)?;
    Ok(())
}
