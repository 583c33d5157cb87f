//! Python module `multspec`.
//!
//! Points of the sphere cross the boundary as `complex`, with `None` for
//! infinity. Coefficient lists follow the document convention: entry `i`
//! multiplies `X^i Y^(d-i)`.

use multspec_core::error::ErrorClass;
use multspec_core::lattes::{self, WeierstrassParams};
use multspec_core::probe::{self, PairKind, Provenance, SampleConfig};
use multspec_core::rootfind::{self, RootOptions};
use multspec_core::spectra::{self, SigmaVector, SpectraOptions};
use multspec_core::{dynatomic, Cplx, HomForm2, Moebius, Precision, ProjPoint};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(multspec, MultspecError, PyException, "Base class of multspec errors.");
create_exception!(multspec, DomainError, MultspecError, "Input outside the domain of the requested quantity.");
create_exception!(multspec, NumericalError, MultspecError, "Numerical failure after the precision retry.");
create_exception!(multspec, SuperattractingError, DomainError, "A cycle in the window is superattracting.");

fn to_py(e: multspec_core::Error) -> PyErr {
    match &e {
        multspec_core::Error::Superattracting { period } => {
            let err = SuperattractingError::new_err(e.to_string());
            Python::attach(|py| {
                let _ = err.value(py).setattr("period", *period);
            });
            err
        }
        _ if e.class() == ErrorClass::Numerical => NumericalError::new_err(e.to_string()),
        _ => DomainError::new_err(e.to_string()),
    }
}

fn cli_to_py(e: multspec_cli::CliError) -> PyErr {
    match e {
        multspec_cli::CliError::Core(e) => to_py(e),
        other => DomainError::new_err(other.to_string()),
    }
}

fn point_out(p: &ProjPoint) -> Option<Cplx<f64>> {
    p.affine()
}

fn point_in(z: Option<Cplx<f64>>) -> ProjPoint {
    z.map_or_else(ProjPoint::infinity, ProjPoint::from_affine)
}

fn options(precision: &str) -> PyResult<SpectraOptions> {
    let p = match precision {
        "double" => Precision::Double,
        "extended" => Precision::Extended,
        other => {
            return Err(DomainError::new_err(format!("unknown precision {other:?}; use \"double\" or \"extended\"")))
        }
    };
    Ok(SpectraOptions::default().with_precision(p))
}

fn blocks(v: Vec<SigmaVector>) -> Vec<Vec<Cplx<f64>>> {
    v.into_iter().map(|b| b.values).collect()
}

fn from_blocks(v: Vec<Vec<Cplx<f64>>>, start: usize) -> Vec<SigmaVector> {
    v.into_iter().enumerate().map(|(i, values)| SigmaVector { n: start + i, values }).collect()
}

/// A rational map of degree at least 2, stored with its largest coefficient
/// scaled to modulus one.
#[pyclass(name = "RationalMap", module = "multspec", frozen, skip_from_py_object)]
struct PyRationalMap {
    inner: multspec_core::RationalMap,
}

#[pymethods]
impl PyRationalMap {
    #[new]
    fn new(numerator: Vec<Cplx<f64>>, denominator: Vec<Cplx<f64>>) -> PyResult<Self> {
        if numerator.len() != denominator.len() {
            return Err(DomainError::new_err("numerator and denominator need the same number of coefficients"));
        }
        let inner =
            multspec_core::RationalMap::new(HomForm2::new(numerator), HomForm2::new(denominator)).map_err(to_py)?;
        Ok(PyRationalMap { inner })
    }

    /// `z^2 + c`.
    #[staticmethod]
    fn quadratic(c: Cplx<f64>) -> PyResult<Self> {
        let one = Cplx::new(1.0, 0.0);
        let zero = Cplx::new(0.0, 0.0);
        Self::new(vec![c, zero, one], vec![one, zero, zero])
    }

    /// Random map with coefficients in the unit disc, as used by the probe.
    #[staticmethod]
    fn random(degree: usize, seed: u64) -> Self {
        PyRationalMap { inner: probe::random_map(degree, seed) }
    }

    /// Parses a JSON map document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = multspec_cli::parse_map_document(text.as_bytes()).map_err(cli_to_py)?;
        Ok(PyRationalMap { inner })
    }

    #[pyo3(signature = (label=None))]
    fn to_json(&self, label: Option<&str>) -> String {
        String::from_utf8(multspec_cli::serialize_map(&self.inner, label.map(str::to_owned)))
            .expect("serializer emits UTF-8")
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn numerator(&self) -> Vec<Cplx<f64>> {
        self.inner.numerator().coeffs().to_vec()
    }

    #[getter]
    fn denominator(&self) -> Vec<Cplx<f64>> {
        self.inner.denominator().coeffs().to_vec()
    }

    fn resultant(&self) -> Cplx<f64> {
        self.inner.resultant()
    }

    /// Image of a point; `None` stands for infinity.
    fn __call__(&self, z: Option<Cplx<f64>>) -> PyResult<Option<Cplx<f64>>> {
        Ok(point_out(&self.inner.apply(&point_in(z)).map_err(to_py)?))
    }

    /// `φ⁻¹ ∘ f ∘ φ` for `φ(z) = (az + b)/(cz + d)`.
    fn conjugate(&self, a: Cplx<f64>, b: Cplx<f64>, c: Cplx<f64>, d: Cplx<f64>) -> PyResult<Self> {
        let phi = Moebius::new(a, b, c, d).map_err(to_py)?;
        Ok(PyRationalMap { inner: self.inner.conjugate_map(&phi).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("RationalMap(degree={})", self.inner.degree())
    }
}

/// Number of points of formal period `n` for a degree-`d` map.
#[pyfunction]
fn nu(d: u64, n: u64) -> PyResult<u64> {
    if d < 2 || n < 1 {
        return Err(DomainError::new_err("need d >= 2 and n >= 1"));
    }
    Ok(dynatomic::nu_count(d, n))
}

/// Coefficients of the dynatomic form of period `n`.
#[pyfunction]
#[pyo3(signature = (f, n, precision="double"))]
fn dynatomic_form(f: &PyRationalMap, n: usize, precision: &str) -> PyResult<Vec<Cplx<f64>>> {
    let p = options(precision)?.precision;
    Ok(dynatomic::dynatomic_form(&f.inner, n, p).map_err(to_py)?.form.coeffs().to_vec())
}

/// `(point, multiplicity, radius)`.
type RootTuple = (Option<Cplx<f64>>, usize, f64);

/// Projective roots of a homogeneous form as `(point, multiplicity, radius)`.
#[pyfunction]
fn roots(coefficients: Vec<Cplx<f64>>) -> PyResult<Vec<RootTuple>> {
    let form = HomForm2::new(coefficients);
    let found = rootfind::projective_roots(&form, &RootOptions::default()).map_err(to_py)?;
    Ok(found.iter().map(|c| (point_out(&c.center), c.multiplicity, c.radius)).collect())
}

/// Cycles of formal period `n` as dicts with `points`, `multiplier`,
/// `multiplicity` and `formal_periods`.
#[pyfunction]
#[pyo3(signature = (f, n, precision="double"))]
fn cycles<'py>(py: Python<'py>, f: &PyRationalMap, n: usize, precision: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let opts = options(precision)?;
    let found = py.detach(|| spectra::assemble_cycles(&f.inner, n, &opts)).map_err(to_py)?;
    found
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("points", c.points.iter().map(point_out).collect::<Vec<_>>())?;
            d.set_item("multiplier", c.multiplier)?;
            d.set_item("multiplicity", c.multiplicity)?;
            d.set_item("formal_periods", c.formal_periods.iter().copied().collect::<Vec<_>>())?;
            Ok(d)
        })
        .collect()
}

/// The multiset `s_n` of multipliers at points of formal period `n`.
#[pyfunction]
#[pyo3(signature = (f, n, precision="double"))]
fn spectrum(py: Python<'_>, f: &PyRationalMap, n: usize, precision: &str) -> PyResult<Vec<Cplx<f64>>> {
    let opts = options(precision)?;
    Ok(py.detach(|| spectra::spectrum_layer(&f.inner, n, &opts)).map_err(to_py)?.multipliers())
}

/// Elementary symmetric functions of `s_n`.
#[pyfunction]
#[pyo3(signature = (f, n, precision="double"))]
fn sigma(py: Python<'_>, f: &PyRationalMap, n: usize, precision: &str) -> PyResult<Vec<Cplx<f64>>> {
    let opts = options(precision)?;
    let layer = py.detach(|| spectra::spectrum_layer(&f.inner, n, &opts)).map_err(to_py)?;
    Ok(spectra::sigma_coords(&layer).values)
}

/// σ blocks for `n..=m`.
#[pyfunction]
#[pyo3(signature = (f, n, m, precision="double"))]
fn rho(py: Python<'_>, f: &PyRationalMap, n: usize, m: usize, precision: &str) -> PyResult<Vec<Vec<Cplx<f64>>>> {
    let opts = options(precision)?;
    Ok(blocks(py.detach(|| spectra::rho_vector(&f.inner, n, m, &opts)).map_err(to_py)?))
}

/// Reciprocal blocks for `n..=m`; raises `SuperattractingError` when a
/// multiplier in the window vanishes.
#[pyfunction]
#[pyo3(signature = (f, n, m, precision="double"))]
fn tau(py: Python<'_>, f: &PyRationalMap, n: usize, m: usize, precision: &str) -> PyResult<Vec<Vec<Cplx<f64>>>> {
    let opts = options(precision)?;
    Ok(blocks(py.detach(|| spectra::tau_vector(&f.inner, n, m, &opts)).map_err(to_py)?.blocks))
}

/// Distance between two lists of σ blocks of matching shapes.
#[pyfunction]
fn sigma_distance(a: Vec<Vec<Cplx<f64>>>, b: Vec<Vec<Cplx<f64>>>) -> PyResult<f64> {
    spectra::sigma_distance(&from_blocks(a, 1), &from_blocks(b, 1)).map_err(to_py)
}

/// Curve invariant `1728·g2³/Δ`.
#[pyfunction]
fn j_invariant(g2: Cplx<f64>, g3: Cplx<f64>) -> PyResult<Cplx<f64>> {
    Ok(lattes::j_invariant(&WeierstrassParams::new(g2, g3).map_err(to_py)?))
}

/// Degree-4 Lattès map of multiplication by 2 on `y² = 4x³ − g2·x − g3`.
#[pyfunction]
fn lattes_map(g2: Cplx<f64>, g3: Cplx<f64>) -> PyResult<PyRationalMap> {
    let p = WeierstrassParams::new(g2, g3).map_err(to_py)?;
    Ok(PyRationalMap { inner: lattes::lattes_mult2(&p).map_err(to_py)? })
}

/// `k` curves `(g2, g3)` with pairwise distinct j-invariants.
#[pyfunction]
#[pyo3(signature = (k, seed=0))]
fn lattes_family(k: usize, seed: u64) -> Vec<(Cplx<f64>, Cplx<f64>)> {
    lattes::family_sample(k, seed).iter().map(|p| (p.g2(), p.g3())).collect()
}

/// Runs a collision probe and returns its summary as a dict.
#[pyfunction]
#[pyo3(signature = (degree, n, m, trials, seed=0, planted_duplicates=0, planted_conjugates=0))]
#[allow(clippy::too_many_arguments)]
fn collision_probe<'py>(
    py: Python<'py>,
    degree: usize,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    planted_duplicates: usize,
    planted_conjugates: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = SampleConfig::new(degree, n, m, trials, seed);
    cfg.planted_duplicates = planted_duplicates;
    cfg.planted_conjugates = planted_conjugates;
    let rep = py.detach(|| probe::collision_probe(&cfg)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("min_inter_distance", rep.min_inter_distance)?;
    out.set_item("max_intra_distance", rep.max_intra_distance)?;
    out.set_item("separated", rep.separated())?;
    out.set_item("superattracting_skips", rep.superattracting_skips())?;
    let provenance: Vec<String> = rep
        .trials
        .iter()
        .map(|t| match t.provenance {
            Provenance::Random => "random".to_string(),
            Provenance::Duplicate { of } => format!("duplicate of {of}"),
            Provenance::Conjugate { of } => format!("conjugate of {of}"),
        })
        .collect();
    out.set_item("provenance", provenance)?;
    let findings: Vec<(usize, usize, &str, f64)> = rep
        .findings
        .iter()
        .map(|p| {
            let kind = match p.kind {
                PairKind::Duplicate => "duplicate",
                PairKind::Conjugate => "conjugate",
                PairKind::Candidate => "candidate",
            };
            (p.a, p.b, kind, p.distance)
        })
        .collect();
    out.set_item("findings", findings)?;
    out.set_item("failures", rep.failures.clone())?;
    Ok(out)
}

#[pymodule]
fn multspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("MultspecError", py.get_type::<MultspecError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("SuperattractingError", py.get_type::<SuperattractingError>())?;
    m.add_class::<PyRationalMap>()?;
    m.add_function(wrap_pyfunction!(nu, m)?)?;
    m.add_function(wrap_pyfunction!(dynatomic_form, m)?)?;
    m.add_function(wrap_pyfunction!(roots, m)?)?;
    m.add_function(wrap_pyfunction!(cycles, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_distance, m)?)?;
    m.add_function(wrap_pyfunction!(j_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(lattes_map, m)?)?;
    m.add_function(wrap_pyfunction!(lattes_family, m)?)?;
    m.add_function(wrap_pyfunction!(collision_probe, m)?)?;
    Ok(())
}
