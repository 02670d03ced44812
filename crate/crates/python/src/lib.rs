//! Python bindings for the `herglotz` crate.
//!
//! Samples are plain lists of floats; complex numbers cross as Python
//! `complex`. Randomness is driven by an explicit integer seed.

use herglotz::hp_core::{self, AtomicMeasure, CircleMeasure};
use herglotz::rng::stream;
use herglotz::stats::{self, CauchyParams, EmpiricalDistribution, Generator};
use herglotz::{metrics, point_process, rmt, stieltjes, Complex64, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Variant(_) | Error::TooFewSamples { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for herglotz::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn distribution(samples: Vec<f64>) -> PyResult<EmpiricalDistribution> {
    EmpiricalDistribution::new(samples).py()
}

fn pair(p: &CauchyParams) -> (f64, f64) {
    (p.re_gamma, p.im_gamma)
}

/// Converts plain Python data (numbers, strings, lists, dicts) to JSON.
fn to_json(v: &Bound<'_, PyAny>) -> PyResult<Value> {
    if let Ok(s) = v.extract::<String>() {
        return Ok(Value::from(s));
    }
    if let Ok(x) = v.extract::<f64>() {
        return Ok(Value::from(x));
    }
    if let Ok(d) = v.cast::<PyDict>() {
        let mut map = serde_json::Map::new();
        for (k, x) in d.iter() {
            map.insert(k.extract::<String>()?, to_json(&x)?);
        }
        return Ok(Value::Object(map));
    }
    if let Ok(l) = v.cast::<PyList>() {
        return Ok(Value::Array(
            l.iter().map(|x| to_json(&x)).collect::<PyResult<_>>()?,
        ));
    }
    Err(PyValueError::new_err(format!("unsupported value {v}")))
}

/// A realization of a point process on `[-half_width, half_width]`.
#[pyclass(name = "PointSample", module = "herglotz_py")]
struct PyPointSample {
    inner: point_process::PointSample,
}

#[pymethods]
impl PyPointSample {
    #[new]
    #[pyo3(signature = (points, half_width, reference_intensity, seed=None))]
    fn new(
        points: Vec<f64>,
        half_width: f64,
        reference_intensity: f64,
        seed: Option<u64>,
    ) -> PyResult<Self> {
        let inner =
            point_process::PointSample::new(points, half_width, reference_intensity, seed).py()?;
        Ok(Self { inner })
    }

    #[getter]
    fn points(&self) -> Vec<f64> {
        self.inner.points().to_vec()
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.inner.half_width()
    }

    #[getter]
    fn reference_intensity(&self) -> f64 {
        self.inner.reference_intensity()
    }

    #[getter]
    fn seed(&self) -> Option<u64> {
        self.inner.seed()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PointSample({} points, half_width={}, reference_intensity={})",
            self.inner.len(),
            self.inner.half_width(),
            self.inner.reference_intensity()
        )
    }

    /// Signed count of points in `(0, x]`, negative for `x < 0`.
    fn counting(&self, x: f64) -> PyResult<i64> {
        self.inner.counting(x).py()
    }

    /// Counting function minus the reference `rho x`.
    fn delta_n(&self, x: f64) -> PyResult<f64> {
        self.inner.delta_n(x).py()
    }

    fn count_in(&self, a: f64, b: f64) -> usize {
        self.inner.count_in(a, b)
    }

    fn shifted(&self, a: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.shifted(a).py()?,
        })
    }

    fn to_json_line(&self) -> String {
        self.inner.to_json_line()
    }

    #[staticmethod]
    fn from_json_line(line: &str) -> PyResult<Self> {
        Ok(Self {
            inner: point_process::PointSample::from_json_line(line).py()?,
        })
    }
}

/// An evaluable Herglotz-Pick function.
#[pyclass(name = "HPFunction", module = "herglotz_py")]
struct PyHPFunction {
    inner: hp_core::HPFunction,
}

#[pymethods]
impl PyHPFunction {
    /// `-pi cot(pi z)`.
    #[staticmethod]
    fn periodic() -> Self {
        Self {
            inner: hp_core::HPFunction::Periodic,
        }
    }

    #[staticmethod]
    fn constant(b: f64) -> Self {
        Self {
            inner: hp_core::HPFunction::constant(b),
        }
    }

    /// `-sum_j alpha_j cot(beta_j z + theta_j)`.
    #[staticmethod]
    fn quasi_periodic(alpha: Vec<f64>, beta: Vec<f64>, theta: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: hp_core::HPFunction::quasi_periodic(alpha, beta, theta).py()?,
        })
    }

    /// `a z + b + sum_j w_j (1/(u_j - z) - u_j/(1 + u_j^2))` for atoms `(u_j, w_j)`.
    #[staticmethod]
    #[pyo3(signature = (atoms, a=0.0, b=0.0))]
    fn represented(atoms: Vec<(f64, f64)>, a: f64, b: f64) -> PyResult<Self> {
        let mu = AtomicMeasure::new(atoms).py()?;
        Ok(Self {
            inner: hp_core::HPFunction::represented(mu, a, b).py()?,
        })
    }

    /// Stieltjes transform of `sample` truncated to `[-window, window]`.
    #[staticmethod]
    fn process_truncated(sample: &PyPointSample, window: f64) -> PyResult<Self> {
        Ok(Self {
            inner: hp_core::HPFunction::process_truncated(sample.inner.clone(), window).py()?,
        })
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant_name()
    }

    fn evaluate(&self, z: Complex64) -> PyResult<Complex64> {
        self.inner.evaluate(z).py()
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.evaluate(z)
    }

    fn __repr__(&self) -> String {
        format!("HPFunction({})", self.inner.variant_name())
    }

    /// Value of the disk transform at `w`, `|w| < 1`.
    fn evaluate_disk(&self, w: Complex64) -> PyResult<Complex64> {
        let g = hp_core::to_disk(&self.inner).py()?;
        hp_core::evaluate_disk(&g, w).py()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            inner: hp_core::HPFunction::from_json(&v).py()?,
        })
    }
}

#[pyfunction]
fn mobius_to_disk(z: Complex64) -> PyResult<Complex64> {
    hp_core::mobius_to_disk(z).py()
}

#[pyfunction]
fn mobius_to_halfplane(w: Complex64) -> PyResult<Complex64> {
    hp_core::mobius_to_halfplane(w).py()
}

#[pyfunction]
fn sample_poisson(half_width: f64, rho: f64, seed: u64) -> PyResult<PyPointSample> {
    let inner = point_process::sample_poisson(half_width, rho, &mut stream(seed)).py()?;
    Ok(PyPointSample { inner })
}

/// Sine-kernel process with unit intensity, discretized at `spacing`.
#[pyfunction]
#[pyo3(signature = (half_width, seed, spacing=0.05))]
fn sample_sine_kernel(half_width: f64, seed: u64, spacing: f64) -> PyResult<PyPointSample> {
    let basis = point_process::SineKernelBasis::cached(half_width, spacing).py()?;
    let inner = point_process::sample_sine_kernel_with(&basis, &mut stream(seed)).py()?;
    Ok(PyPointSample { inner })
}

/// Sorted eigenvalues of an `n x n` GUE matrix with semicircle on `[-2, 2]`.
#[pyfunction]
fn sample_gue_spectrum(n: usize, seed: u64) -> PyResult<Vec<f64>> {
    Ok(rmt::sample_gue_spectrum(n, &mut stream(seed))
        .py()?
        .eigenvalues)
}

#[pyfunction]
fn semicircle_density(e: f64) -> PyResult<f64> {
    rmt::semicircle_density(e).py()
}

/// Eigenvalues rescaled to unit mean spacing around `e0`.
#[pyfunction]
fn microscopic_rescale(eigenvalues: Vec<f64>, e0: f64, density: f64) -> PyResult<PyPointSample> {
    let spec = rmt::Spectrum::new(eigenvalues, "user");
    let inner = rmt::microscopic_rescale(&spec, e0, density).py()?;
    Ok(PyPointSample { inner })
}

#[pyfunction]
fn tridiagonal_eigenvalues(diagonal: Vec<f64>, offdiagonal: Vec<f64>) -> PyResult<Vec<f64>> {
    rmt::tridiag_eigenvalues(&diagonal, &offdiagonal).py()
}

#[pyfunction]
fn truncated_transform(sample: &PyPointSample, z: Complex64, window: f64) -> PyResult<Complex64> {
    Ok(stieltjes::truncated_transform(&sample.inner, z, window)
        .py()?
        .value)
}

/// Truncated transform plus the counting corrections; returns the value and
/// the tail heuristic.
#[pyfunction]
fn corrected_transform(
    sample: &PyPointSample,
    z: Complex64,
    window: f64,
) -> PyResult<(Complex64, f64)> {
    let r = stieltjes::corrected_transform(&sample.inner, z, window).py()?;
    Ok((r.value, r.truncation_error))
}

#[pyfunction]
fn extrapolated_transform(
    sample: &PyPointSample,
    z: Complex64,
    window: f64,
) -> PyResult<Complex64> {
    Ok(stieltjes::extrapolated_transform(&sample.inner, z, window)
        .py()?
        .value)
}

#[pyfunction]
fn boundary_value(sample: &PyPointSample, x: f64, window: f64) -> PyResult<f64> {
    stieltjes::boundary_value(&sample.inner, x, window).py()
}

#[pyfunction]
fn centred_boundary_value(sample: &PyPointSample, x: f64, window: f64) -> PyResult<f64> {
    stieltjes::centred_boundary_value(&sample.inner, x, window).py()
}

/// Boundary values `F(x)` at `count` shifts drawn from `[-length/2, length/2]`.
#[pyfunction]
#[pyo3(signature = (f, length, count, seed, stratified=true))]
fn shift_distribution(
    f: &PyHPFunction,
    length: f64,
    count: usize,
    seed: u64,
    stratified: bool,
) -> PyResult<Vec<f64>> {
    let eval = |x: f64| f.inner.evaluate(Complex64::new(x, 0.0)).map(|v| v.re);
    let d = stats::shift_distribution(eval, length, count, stratified, seed).py()?;
    Ok(d.distribution.samples().to_vec())
}

/// Returns `(re_gamma, im_gamma)`.
#[pyfunction]
fn fit_cauchy_quantile(samples: Vec<f64>) -> PyResult<(f64, f64)> {
    Ok(pair(
        &stats::fit_cauchy_quantile(&distribution(samples)?).py()?,
    ))
}

#[pyfunction]
#[pyo3(signature = (samples, t_grid=None))]
fn fit_cauchy_charfn(samples: Vec<f64>, t_grid: Option<Vec<f64>>) -> PyResult<(f64, f64)> {
    let grid = t_grid.unwrap_or_else(|| (1..=10).map(|k| 0.1 * k as f64).collect());
    Ok(pair(
        &stats::fit_cauchy_charfn(&distribution(samples)?, &grid).py()?,
    ))
}

/// `Gamma` from the mean of `-1/(v + i)`.
#[pyfunction]
fn estimate_gamma_inverse(samples: Vec<f64>) -> PyResult<Complex64> {
    stats::estimate_gamma_inverse(&distribution(samples)?).py()
}

/// Returns `(ks_statistic, p_value)` against Cauchy with the given `Gamma`.
#[pyfunction]
fn ks_test_cauchy(samples: Vec<f64>, re_gamma: f64, im_gamma: f64) -> PyResult<(f64, f64)> {
    let params = CauchyParams::new(re_gamma, im_gamma).py()?;
    let r = stats::ks_test_cauchy(&distribution(samples)?, &params).py()?;
    Ok((r.ks_statistic, r.p_value))
}

#[pyfunction]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    Ok(stats::ks_two_sample(&distribution(a)?, &distribution(b)?))
}

/// Predicted `(re_gamma, im_gamma)`, e.g. `predicted_gamma("gue", e0=0.5)` or
/// `predicted_gamma("diagonal", density={"law": "standard-normal"}, e0=0)`.
#[pyfunction]
#[pyo3(signature = (generator, **params))]
fn predicted_gamma(generator: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<(f64, f64)> {
    let mut map = serde_json::Map::new();
    map.insert("generator".into(), Value::from(generator));
    if let Some(p) = params {
        for (k, v) in p.iter() {
            map.insert(k.extract::<String>()?, to_json(&v)?);
        }
    }
    let g: Generator = serde_json::from_value(Value::Object(map))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(pair(&stats::predicted_gamma(&g).py()?))
}

/// Returns `(level_set_measure, exact, relative_error)`.
#[pyfunction]
fn boole_verify(atoms: Vec<(f64, f64)>, t: f64) -> PyResult<(f64, f64, f64)> {
    let r = stats::boole_verify(&AtomicMeasure::new(atoms).py()?, t).py()?;
    Ok((r.level_set_measure, r.exact, r.relative_error))
}

fn circle(atoms: Vec<(f64, f64)>) -> PyResult<CircleMeasure> {
    CircleMeasure::new(atoms).py()
}

/// Distances between atomic measures on the circle, atoms `(theta, mass)`.
#[pyfunction]
fn wasserstein_circle(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> PyResult<f64> {
    metrics::wasserstein_circle(&circle(a)?, &circle(b)?).py()
}

#[pyfunction]
fn flat_distance(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> PyResult<f64> {
    Ok(metrics::flat_distance(&circle(a)?, &circle(b)?))
}

#[pyfunction]
fn variational_distance(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> PyResult<f64> {
    Ok(metrics::variational_distance(&circle(a)?, &circle(b)?))
}

#[pymodule]
fn herglotz_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPointSample>()?;
    m.add_class::<PyHPFunction>()?;
    m.add_function(wrap_pyfunction!(mobius_to_disk, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_to_halfplane, m)?)?;
    m.add_function(wrap_pyfunction!(sample_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(sample_sine_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gue_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(semicircle_density, m)?)?;
    m.add_function(wrap_pyfunction!(microscopic_rescale, m)?)?;
    m.add_function(wrap_pyfunction!(tridiagonal_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_transform, m)?)?;
    m.add_function(wrap_pyfunction!(corrected_transform, m)?)?;
    m.add_function(wrap_pyfunction!(extrapolated_transform, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_value, m)?)?;
    m.add_function(wrap_pyfunction!(centred_boundary_value, m)?)?;
    m.add_function(wrap_pyfunction!(shift_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(fit_cauchy_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(fit_cauchy_charfn, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_gamma_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(ks_test_cauchy, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(boole_verify, m)?)?;
    m.add_function(wrap_pyfunction!(wasserstein_circle, m)?)?;
    m.add_function(wrap_pyfunction!(flat_distance, m)?)?;
    m.add_function(wrap_pyfunction!(variational_distance, m)?)?;
    Ok(())
}
