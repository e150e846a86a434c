//! Python bindings: the core distributions, channels, constraint sets, rate
//! bounds and a Monte Carlo entry point.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use shaping_core::channels::{self, OutputGrid, PamAwgnConfig};
use shaping_core::montecarlo::{self, McConfig, Selection};
use shaping_core::{info, projection, rates};

fn to_py(err: shaping_core::Error) -> PyErr {
    match err {
        shaping_core::Error::NonConvergence { .. } | shaping_core::Error::NoAcceptances { .. } => {
            PyRuntimeError::new_err(err.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for shaping_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Probability mass function over `0..k`.
#[pyclass(name = "Pmf", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyPmf(pub shaping_core::Pmf);

#[pymethods]
impl PyPmf {
    #[new]
    fn new(probs: Vec<f64>) -> PyResult<Self> {
        shaping_core::Pmf::new(probs).py().map(Self)
    }

    #[staticmethod]
    fn uniform(k: usize) -> PyResult<Self> {
        shaping_core::Pmf::uniform(k).py().map(Self)
    }

    #[staticmethod]
    fn binary(p1: f64) -> PyResult<Self> {
        shaping_core::Pmf::binary(p1).py().map(Self)
    }

    #[staticmethod]
    fn from_weights(weights: Vec<f64>) -> PyResult<Self> {
        shaping_core::Pmf::from_weights(weights).py().map(Self)
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.0.probs().to_vec()
    }

    #[getter]
    fn support_size(&self) -> usize {
        self.0.support_size()
    }

    fn entropy(&self) -> f64 {
        info::entropy(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.support_size()
    }

    fn __getitem__(&self, x: usize) -> PyResult<f64> {
        self.0
            .probs()
            .get(x)
            .copied()
            .ok_or_else(|| pyo3::exceptions::PyIndexError::new_err(x))
    }

    fn __repr__(&self) -> String {
        format!("Pmf({:?})", self.0.probs())
    }
}

/// Memoryless channel; `rows[x][y] = p(y|x)`.
#[pyclass(name = "Channel", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyChannel(pub shaping_core::Channel);

#[pymethods]
impl PyChannel {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        shaping_core::Channel::new(rows).py().map(Self)
    }

    #[staticmethod]
    fn bsc(gamma: f64) -> PyResult<Self> {
        channels::bsc(gamma).py().map(Self)
    }

    #[staticmethod]
    fn bnsc(gamma0: f64, gamma1: f64) -> PyResult<Self> {
        channels::bnsc(gamma0, gamma1).py().map(Self)
    }

    #[staticmethod]
    fn identity(k: usize) -> PyResult<Self> {
        shaping_core::Channel::identity(k).py().map(Self)
    }

    /// `Y = αX + Z` quantized onto a uniform output grid.
    #[staticmethod]
    #[pyo3(signature = (levels, alpha, noise_variance, points_per_sigma = 32, half_width_sigmas = 8.0))]
    fn quantized_awgn(
        levels: Vec<f64>,
        alpha: f64,
        noise_variance: f64,
        points_per_sigma: usize,
        half_width_sigmas: f64,
    ) -> PyResult<Self> {
        let mut cfg = PamAwgnConfig::new(levels, alpha, noise_variance, 1.0);
        cfg.output_grid = OutputGrid {
            half_width_sigmas,
            points_per_sigma,
        };
        channels::quantized_awgn(&cfg).py().map(Self)
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows().to_vec()
    }

    #[getter]
    fn input_size(&self) -> usize {
        self.0.input_size()
    }

    #[getter]
    fn output_size(&self) -> usize {
        self.0.output_size()
    }

    fn __repr__(&self) -> String {
        format!("Channel({}x{})", self.0.input_size(), self.0.output_size())
    }
}

/// Constraints `E_q[φ_l] ≤ β_l`.
#[pyclass(name = "ConstraintSet", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyConstraintSet(pub shaping_core::ConstraintSet);

#[pymethods]
impl PyConstraintSet {
    #[new]
    fn new(phi: Vec<Vec<f64>>, beta: Vec<f64>) -> PyResult<Self> {
        shaping_core::ConstraintSet::new(phi, beta).py().map(Self)
    }

    #[staticmethod]
    fn hamming(beta0: f64) -> PyResult<Self> {
        shaping_core::ConstraintSet::hamming(beta0).py().map(Self)
    }

    #[staticmethod]
    fn power(levels: Vec<f64>, beta0: f64) -> PyResult<Self> {
        shaping_core::ConstraintSet::power(&levels, beta0)
            .py()
            .map(Self)
    }

    #[pyo3(signature = (p, tol = 1e-12))]
    fn contains(&self, p: &PyPmf, tol: f64) -> bool {
        self.0.contains(&p.0, tol)
    }

    #[getter]
    fn phi(&self) -> Vec<Vec<f64>> {
        self.0.phi().to_vec()
    }

    #[getter]
    fn beta(&self) -> Vec<f64> {
        self.0.beta().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("ConstraintSet(beta={:?})", self.0.beta())
    }
}

#[pyclass(name = "ProjectionResult", frozen, get_all)]
pub struct PyProjection {
    q_star: PyPmf,
    multipliers: Vec<f64>,
    divergence_bits: f64,
    rs_min_bits: f64,
}

#[pyclass(name = "RateReport", frozen, get_all)]
pub struct PyRateReport {
    r_matched_bits: f64,
    r_gallager_bits: f64,
    r_mjt_bits: Option<f64>,
    r_naive_bits: f64,
    codeword_cap_bits: f64,
    rs_min_bits: f64,
}

#[pymethods]
impl PyRateReport {
    fn __repr__(&self) -> String {
        let mjt = self
            .r_mjt_bits
            .map_or_else(|| "None".to_string(), |v| format!("{v:.6}"));
        format!(
            "RateReport(matched={:.6}, gallager={:.6}, mjt={mjt}, naive={:.6})",
            self.r_matched_bits, self.r_gallager_bits, self.r_naive_bits
        )
    }
}

#[pyfunction]
fn entropy(p: &PyPmf) -> f64 {
    info::entropy(&p.0)
}

#[pyfunction]
fn kl_divergence(q: &PyPmf, p: &PyPmf) -> PyResult<f64> {
    info::kl_divergence(&q.0, &p.0).py()
}

#[pyfunction]
fn mutual_information(p: &PyPmf, ch: &PyChannel) -> PyResult<f64> {
    info::mutual_information(&p.0, &ch.0).py()
}

#[pyfunction]
fn project(p: &PyPmf, e: &PyConstraintSet) -> PyResult<PyProjection> {
    let r = projection::project(&p.0, &e.0).py()?;
    Ok(PyProjection {
        q_star: PyPmf(r.q_star),
        multipliers: r.multipliers,
        divergence_bits: r.divergence_bits,
        rs_min_bits: r.rs_min_bits,
    })
}

#[pyfunction]
fn rate_report(
    py: Python<'_>,
    p: &PyPmf,
    e: &PyConstraintSet,
    ch: &PyChannel,
) -> PyResult<PyRateReport> {
    let (p, e, ch) = (p.0.clone(), e.0.clone(), ch.0.clone());
    let r = py.detach(move || rates::rate_report(&p, &e, &ch)).py()?;
    Ok(PyRateReport {
        r_matched_bits: r.r_matched_bits,
        r_gallager_bits: r.r_gallager_bits,
        r_mjt_bits: r.r_mjt_bits,
        r_naive_bits: r.r_naive_bits,
        codeword_cap_bits: r.codeword_cap_bits,
        rs_min_bits: r.rs_min_bits,
    })
}

#[pyfunction]
fn gallager_e0(rho: f64, p1: &PyPmf, p2: &PyPmf, ch: &PyChannel) -> PyResult<f64> {
    rates::gallager_e0(rho, &p1.0, &p2.0, &ch.0).py()
}

#[pyfunction]
fn maxwell_boltzmann(levels: Vec<f64>, target_power: f64) -> PyResult<(PyPmf, f64)> {
    let mb = projection::maxwell_boltzmann(&levels, target_power).py()?;
    Ok((PyPmf(mb.pmf), mb.t))
}

#[pyfunction]
#[pyo3(signature = (ch, e, tol = 1e-9))]
fn constrained_capacity_baa(
    py: Python<'_>,
    ch: &PyChannel,
    e: &PyConstraintSet,
    tol: f64,
) -> PyResult<(PyPmf, f64)> {
    let (ch, e) = (ch.0.clone(), e.0.clone());
    let (q, c) = py
        .detach(move || channels::constrained_capacity_baa(&ch, &e, tol))
        .py()?;
    Ok((PyPmf(q), c))
}

#[pyfunction]
fn exact_pne_binary(p: &PyPmf, beta0: f64, n: usize) -> PyResult<f64> {
    projection::exact_pne_binary(&p.0, beta0, n).py()
}

#[pyfunction]
fn pam(m: usize) -> PyResult<Vec<f64>> {
    channels::pam(m).py()
}

#[pyfunction]
fn bnsc_mjt_input(gamma0: f64, gamma1: f64) -> PyResult<PyPmf> {
    channels::bnsc_mjt_input(gamma0, gamma1).py().map(PyPmf)
}

#[pyfunction]
fn gaussian_largecode_rate(beta0: f64, b0: f64, noise_variance: f64) -> PyResult<(f64, f64)> {
    channels::gaussian_largecode_rate(beta0, b0, noise_variance).py()
}

/// Every bound at one SNR, with each scaling optimized separately.
#[pyfunction]
#[pyo3(signature = (levels, noise_variance, snr_db, points_per_sigma = 32))]
fn awgn_point<'py>(
    py: Python<'py>,
    levels: Vec<f64>,
    noise_variance: f64,
    snr_db: f64,
    points_per_sigma: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = OutputGrid {
        points_per_sigma,
        ..OutputGrid::default()
    };
    let r = py
        .detach(move || channels::awgn_point(&levels, noise_variance, snr_db, grid))
        .py()?;
    let d = PyDict::new(py);
    d.set_item("snr_db", r.snr_db)?;
    d.set_item("capacity_bits", r.capacity_bits)?;
    d.set_item("r_uniform_bits", r.r_uniform_bits)?;
    d.set_item("r_matched_bits", r.r_matched_bits)?;
    d.set_item("r_gallager_bits", r.r_gallager_bits)?;
    d.set_item("r_mjt_bits", r.r_mjt_bits)?;
    d.set_item("r_naive_bits", r.r_naive_bits)?;
    Ok(d)
}

/// Monte Carlo estimate of the set-selection success probability.
#[pyfunction]
#[pyo3(signature = (n, rs, p, e, trials, seed = 0))]
fn estimate_ps<'py>(
    py: Python<'py>,
    n: usize,
    rs: f64,
    p: &PyPmf,
    e: &PyConstraintSet,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = McConfig {
        n,
        rs_bits: rs,
        rq_bits: 0.0,
        p: p.0.clone(),
        e: e.0.clone(),
        ch: shaping_core::Channel::identity(p.0.support_size()).py()?,
        trials,
        seed,
        selection: Selection::FirstSatisfying,
    };
    let set_size = cfg.set_size();
    let r = py.detach(move || montecarlo::estimate_ps(&cfg)).py()?;
    let ps = r.ps_hat.expect("estimate_ps fills ps_hat");
    let d = PyDict::new(py);
    d.set_item("set_size", set_size)?;
    d.set_item("successes", ps.successes)?;
    d.set_item("trials", ps.trials)?;
    d.set_item("ps_hat", ps.value)?;
    d.set_item("ci", (ps.ci_low, ps.ci_high))?;
    d.set_item("marginal", r.marginal)?;
    d.set_item("marginal_l1", r.marginal_l1)?;
    Ok(d)
}

#[pymodule]
fn shaping(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPmf>()?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyConstraintSet>()?;
    m.add_class::<PyProjection>()?;
    m.add_class::<PyRateReport>()?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(rate_report, m)?)?;
    m.add_function(wrap_pyfunction!(gallager_e0, m)?)?;
    m.add_function(wrap_pyfunction!(maxwell_boltzmann, m)?)?;
    m.add_function(wrap_pyfunction!(constrained_capacity_baa, m)?)?;
    m.add_function(wrap_pyfunction!(exact_pne_binary, m)?)?;
    m.add_function(wrap_pyfunction!(pam, m)?)?;
    m.add_function(wrap_pyfunction!(bnsc_mjt_input, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_largecode_rate, m)?)?;
    m.add_function(wrap_pyfunction!(awgn_point, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_ps, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_errors_map_to_runtime_error() {
        let e = shaping_core::Error::NonConvergence {
            solver: "s",
            iterations: 1,
            residual: 1.0,
        };
        Python::initialize();
        let (v, r) = Python::attach(|py| {
            (
                to_py(shaping_core::Error::EmptyAlphabet).is_instance_of::<PyValueError>(py),
                to_py(e).is_instance_of::<PyRuntimeError>(py),
            )
        });
        assert!(v && r);
    }
}
