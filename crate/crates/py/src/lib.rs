//! Python bindings: mappings, classification reports, façons, the probe and
//! the catalogue.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use asympt_core::classify::{self as analysis, AsymptoticSetReport, CatalogueOptions, ClassifyOptions};
use asympt_core::poly::PolynomialMapping;
use asympt_core::probe::{self, ProbeConfig};
use asympt_core::rng::DEFAULT_SEED;
use asympt_core::{Error, Result};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::Domain(_) | Error::Unsupported(_) | Error::DimensionMismatch { .. } => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

fn py_result<T>(r: Result<T>) -> PyResult<T> {
    r.map_err(to_py)
}

/// A polynomial mapping `C^n -> C^n`, parsed from the mapping file format.
#[pyclass(frozen, module = "asympt")]
struct Mapping {
    inner: PolynomialMapping,
}

#[pymethods]
impl Mapping {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let inner = asympt_core::parse_mapping(text).map_err(|e| to_py(e.into()))?;
        Ok(Self { inner })
    }

    /// Builds a mapping from component expressions in `x1..xn`.
    #[staticmethod]
    fn from_components(components: Vec<String>) -> PyResult<Self> {
        let n = components.len();
        let mut text = format!("dim {n}\n");
        for (i, c) in components.iter().enumerate() {
            text += &format!("F{} = {c}\n", i + 1);
        }
        Self::new(&text)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn degree(&self) -> Option<u32> {
        self.inner.degree().finite()
    }

    #[getter]
    fn components(&self) -> Vec<String> {
        self.inner.components().iter().map(ToString::to_string).collect()
    }

    fn is_dominant(&self) -> bool {
        self.inner.is_dominant()
    }

    /// Text in the mapping file format.
    fn render(&self) -> String {
        asympt_core::render_mapping(&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Mapping('{}')", self.inner)
    }
}

/// Asymptotic-set report of one mapping.
#[pyclass(frozen, module = "asympt")]
struct Report {
    inner: AsymptoticSetReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn dominant(&self) -> bool {
        self.inner.dominant
    }

    #[getter]
    fn proper(&self) -> bool {
        self.inner.proper
    }

    #[getter]
    fn matched_type(&self) -> Option<u8> {
        self.inner.matched_type
    }

    #[getter]
    fn realized_facons(&self) -> Vec<String> {
        self.inner.realized_facons()
    }

    /// `(equation, shape, façons)` per two-dimensional component.
    #[getter]
    fn components(&self) -> Vec<(String, String, Vec<String>)> {
        self.inner
            .components
            .iter()
            .map(|c| (c.equation.clone(), format!("{:?}", c.kind).to_lowercase(), c.facons.clone()))
            .collect()
    }

    #[getter]
    fn oracle_residual(&self) -> Option<f64> {
        self.inner.oracle_residual
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        let eqs: Vec<&str> = self.inner.components.iter().map(|c| c.equation.as_str()).collect();
        format!("Report(type={:?}, components={eqs:?})", self.inner.matched_type)
    }
}

/// Façons of `C^n` in enumeration order, as `(I)[J]` strings.
#[pyfunction]
fn facons(n: usize) -> PyResult<Vec<String>> {
    Ok(py_result(asympt_core::enumerate_facons(n))?.iter().map(ToString::to_string).collect())
}

#[pyfunction]
fn facon_count_formula(n: usize) -> PyResult<u128> {
    py_result(asympt_core::facon_count_formula(n))
}

/// Classifies `mapping`; with `probe=True` the sampling oracle's residual is
/// embedded in the report.
#[pyfunction]
#[pyo3(signature = (mapping, seed=None, probe=false))]
fn classify(py: Python<'_>, mapping: &Mapping, seed: Option<u64>, probe: bool) -> PyResult<Report> {
    let f = mapping.inner.clone();
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let inner = py.detach(move || -> Result<AsymptoticSetReport> {
        let opts = ClassifyOptions { seed, ..ClassifyOptions::default() };
        let mut r = analysis::classify_mapping_with(&f, &opts)?;
        if probe {
            let cfg = ProbeConfig { seed, ..ProbeConfig::default() };
            let cloud = probe::sample_asymptotic(&f, &cfg)?;
            r.oracle_residual = Some(probe::crosscheck(&r, &cloud, cfg.fit_tolerance)?.max_residual);
        }
        Ok(r)
    });
    Ok(Report { inner: py_result(inner)? })
}

/// Samples the asymptotic set and fits implicit equations per façon
/// template. Returns `(points, fits)` with fits as
/// `(signature, equation, residual, cluster size)`.
#[pyfunction]
#[pyo3(signature = (mapping, seed=None, samples=None, steps=None))]
fn probe_fit(
    py: Python<'_>,
    mapping: &Mapping,
    seed: Option<u64>,
    samples: Option<usize>,
    steps: Option<usize>,
) -> PyResult<(usize, Vec<(String, String, f64, usize)>)> {
    let f = mapping.inner.clone();
    let d = ProbeConfig::default();
    let cfg = ProbeConfig {
        seed: seed.unwrap_or(DEFAULT_SEED),
        samples_per_radius: samples.unwrap_or(d.samples_per_radius),
        steps: steps.unwrap_or(d.steps),
        ..d
    };
    py_result(cfg.validate())?;
    let res = py.detach(move || -> Result<_> {
        let cloud = probe::sample_asymptotic(&f, &cfg)?;
        let fits = probe::fit_implicit(&cloud, 2, cfg.fit_tolerance)?;
        Ok((cloud.points.len(), fits))
    });
    let (points, fits) = py_result(res)?;
    Ok((points, fits.into_iter().map(|f| (f.sig, f.equation, f.residual, f.points)).collect()))
}

/// Catalogue of realizable types with witnesses, as JSON. Slow: about a
/// minute on one core.
#[pyfunction]
#[pyo3(signature = (seed=None))]
fn catalogue_json(py: Python<'_>, seed: Option<u64>) -> PyResult<String> {
    let opts = CatalogueOptions { seed: seed.unwrap_or(DEFAULT_SEED), ..CatalogueOptions::default() };
    let c = py.detach(move || analysis::catalogue_with(3, 2, &opts));
    Ok(py_result(c)?.to_json())
}

/// Runs the self-check suite; returns `(name, passed, detail)` per check.
#[pyfunction]
#[pyo3(signature = (quick=true, seed=None))]
fn check(py: Python<'_>, quick: bool, seed: Option<u64>) -> Vec<(String, bool, String)> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    py.detach(move || asympt_core::suite::run_suite(quick, seed, None))
        .into_iter()
        .map(|r| (r.name, r.passed, r.detail))
        .collect()
}

#[pymodule]
fn asympt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", asympt_core::VERSION)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_class::<Mapping>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(facons, m)?)?;
    m.add_function(wrap_pyfunction!(facon_count_formula, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(probe_fit, m)?)?;
    m.add_function(wrap_pyfunction!(catalogue_json, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}
