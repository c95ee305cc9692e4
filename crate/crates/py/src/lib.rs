//! Python bindings. Instances cross the boundary as an opaque `Instance`
//! wrapper with JSON round-tripping; reports come back as plain dicts.

use num_traits::ToPrimitive;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::Serialize;

use stabnoise::gf2::BitVec;
use stabnoise::mixing::{self, ChainConfig, Method, MonteCarlo};
use stabnoise::noise::{BernParam, DepolParam};
use stabnoise::oracles;
use stabnoise::problems::{self, Instance};
use stabnoise::reductions::{self, parse_rational, LpnToSympConfig};
use stabnoise::rng::{seeded, trial_rng};
use stabnoise::stats;
use stabnoise::symplectic::{self, pauli_of_symp, symp_of_pauli, PauliVec};

fn err(e: stabnoise::Error) -> PyErr {
    PyValueError::new_err(format!("[{}] {e}", e.kind()))
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("[json] {e}"))
}

/// Serializes through the `json` module so callers get ordinary dicts.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(json_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn big_int<'py>(py: Python<'py>, digits: String) -> PyResult<Bound<'py, PyAny>> {
    py.import("builtins")?.getattr("int")?.call1((digits,))
}

/// Rates may be given as `float`, decimal string or `"a/b"`.
fn rate_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_str()?.to_string());
    }
    let x: f64 = obj.extract()?;
    Ok(x.to_string())
}

fn rate_f64(obj: &Bound<'_, PyAny>) -> PyResult<f64> {
    let r = parse_rational(&rate_text(obj)?).map_err(err)?;
    r.to_f64().ok_or_else(|| PyValueError::new_err("rate out of range"))
}

fn bits(v: &BitVec) -> String {
    (0..v.len()).map(|i| if v.get(i) { '1' } else { '0' }).collect()
}

/// An n-qubit Pauli operator without phase, written as letters `IXYZ`.
#[pyclass(name = "Pauli", module = "pystabnoise", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct Pauli(PauliVec);

#[pymethods]
impl Pauli {
    #[new]
    fn new(letters: &str) -> PyResult<Self> {
        symp_of_pauli(letters).map(Pauli).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.0.weight()
    }

    fn commutes(&self, other: &Pauli) -> PyResult<bool> {
        if other.0.n() != self.0.n() {
            return Err(PyValueError::new_err("qubit counts differ"));
        }
        Ok(!self.0.symp_inner(&other.0))
    }

    fn __mul__(&self, other: &Pauli) -> PyResult<Pauli> {
        if other.0.n() != self.0.n() {
            return Err(PyValueError::new_err("qubit counts differ"));
        }
        Ok(Pauli(self.0.mul(&other.0)))
    }

    fn __str__(&self) -> String {
        pauli_of_symp(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Pauli('{}')", pauli_of_symp(&self.0))
    }
}

/// A sampled problem instance, public data plus the hidden block if kept.
#[pyclass(name = "Instance", module = "pystabnoise", from_py_object)]
#[derive(Clone)]
struct PyInstance(Instance);

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(PyInstance).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    #[getter]
    fn problem(&self) -> &'static str {
        self.0.name()
    }

    /// Ground truth for decision problems, `None` once hidden data is stripped.
    #[getter]
    fn structured(&self) -> Option<bool> {
        match &self.0 {
            Instance::Lpn(i) => i.hidden.as_ref().map(|h| h.structured),
            Instance::Symplpn(i) => i.hidden.as_ref().map(|h| h.structured),
            Instance::Lsn(i) => i.hidden.as_ref().map(|h| h.structured),
            Instance::LsnQuantum(i) => i.hidden.as_ref().map(|h| h.structured),
            Instance::Qsdp(i) => i.hidden.as_ref().map(|_| true),
        }
    }

    /// Secret as a bit string, or the planted error for QSDP.
    #[getter]
    fn secret(&self) -> Option<String> {
        match &self.0 {
            Instance::Lpn(i) => i.hidden.as_ref().and_then(|h| h.secret.as_ref()).map(bits),
            Instance::Symplpn(i) => i.hidden.as_ref().and_then(|h| h.secret.as_ref()).map(bits),
            Instance::Lsn(i) => i.hidden.as_ref().and_then(|h| h.secret.as_ref()).map(bits),
            Instance::LsnQuantum(i) => i.hidden.as_ref().and_then(|h| h.secret.as_ref()).map(bits),
            Instance::Qsdp(i) => i.hidden.as_ref().map(|h| pauli_of_symp(&h.error)),
        }
    }

    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        match &self.0 {
            Instance::Lpn(i) => to_py(py, &i.params),
            Instance::Symplpn(i) => to_py(py, &i.params),
            Instance::Lsn(i) => to_py(py, &i.params),
            Instance::LsnQuantum(i) => to_py(py, &i.params),
            Instance::Qsdp(i) => to_py(py, &i.params),
        }
    }

    fn strip_hidden(&mut self) {
        self.0.strip_hidden();
    }

    fn __repr__(&self) -> String {
        format!("Instance(problem='{}')", self.0.name())
    }
}

/// Samples an instance. `n` is rows for LPN and qubits otherwise; `k` is the
/// secret length or number of logical qubits.
#[pyfunction]
#[pyo3(signature = (problem, n, p=None, k=1, m=1, w=1, structured=true, seed=0))]
#[allow(clippy::too_many_arguments)]
fn sample(
    problem: &str,
    n: usize,
    p: Option<&Bound<'_, PyAny>>,
    k: usize,
    m: usize,
    w: usize,
    structured: bool,
    seed: u64,
) -> PyResult<PyInstance> {
    let p = p.map(rate_f64).transpose()?.unwrap_or(0.0);
    let mut rng = seeded(seed);
    let rng = &mut rng;
    let depol = || DepolParam::new(p).map_err(err);
    let inst = match problem {
        "lpn" => {
            Instance::Lpn(problems::sample_lpn(k, n, BernParam::new(p).map_err(err)?, structured, rng).map_err(err)?)
        }
        "symplpn" => Instance::Symplpn(problems::sample_symplpn(n, depol()?, structured, rng).map_err(err)?),
        "lsn" => Instance::Lsn(problems::sample_lsn_classical(k, n, depol()?, m, structured, rng).map_err(err)?),
        "lsn-quantum" => {
            Instance::LsnQuantum(problems::sample_lsn_quantum(k, n, depol()?, m, structured, rng).map_err(err)?)
        }
        "qsdp" => Instance::Qsdp(problems::sample_qsdp(n, k, w, rng).map_err(err)?),
        other => return Err(PyValueError::new_err(format!("unknown problem {other:?}"))),
    };
    Ok(PyInstance(inst))
}

/// Maximum-likelihood secret as a bit string.
#[pyfunction]
#[pyo3(signature = (inst, seed=0))]
fn ml_search(py: Python<'_>, inst: &PyInstance, seed: u64) -> PyResult<String> {
    let inst = inst.0.clone();
    py.detach(move || {
        let mut rng = seeded(seed);
        let x = match &inst {
            Instance::Lpn(i) => oracles::lpn_ml_search(i),
            Instance::Symplpn(i) => oracles::symplpn_ml_search(i),
            Instance::Lsn(i) => oracles::lsn_ml_search(i),
            Instance::LsnQuantum(i) => oracles::lsn_quantum_ml_search(i, &mut rng),
            Instance::Qsdp(_) => return Err(PyValueError::new_err("use min_weight for qsdp instances")),
        };
        x.map(|x| bits(&x)).map_err(err)
    })
}

/// Likelihood-ratio guess: `True` means structured.
#[pyfunction]
#[pyo3(signature = (inst, seed=0))]
fn lr_decision(py: Python<'_>, inst: &PyInstance, seed: u64) -> PyResult<bool> {
    let inst = inst.0.clone();
    py.detach(move || {
        let mut rng = seeded(seed);
        match &inst {
            Instance::Lpn(i) => oracles::lpn_lr_decision(i),
            Instance::Symplpn(i) => oracles::symplpn_lr_decision(i),
            Instance::Lsn(i) => oracles::lsn_lr_decision(i),
            Instance::LsnQuantum(i) => oracles::lsn_quantum_lr_decision(i, &mut rng),
            Instance::Qsdp(_) => return Err(PyValueError::new_err("qsdp has no decision oracle")),
        }
        .map_err(err)
    })
}

/// Lowest-weight Pauli with the instance syndrome, if one of weight <= w exists.
#[pyfunction]
fn min_weight(inst: &PyInstance) -> PyResult<Option<Pauli>> {
    let Instance::Qsdp(i) = &inst.0 else {
        return Err(PyValueError::new_err("min_weight expects a qsdp instance"));
    };
    let found = oracles::qsdp_min_weight(&i.public.h, &i.public.v, i.params.w).map_err(err)?;
    Ok(found.map(Pauli))
}

/// Applies one reduction step and returns `(instance, trace)`.
#[pyfunction]
#[pyo3(signature = (inst, chain, seed=0, eps=None, k=1, m=1, w=1, target=None))]
#[allow(clippy::too_many_arguments)]
fn reduce<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    chain: &str,
    seed: u64,
    eps: Option<&Bound<'py, PyAny>>,
    k: usize,
    m: usize,
    w: usize,
    target: Option<&Bound<'py, PyAny>>,
) -> PyResult<(PyInstance, Bound<'py, PyAny>)> {
    let mut rng = seeded(seed);
    let rng = &mut rng;
    let none = || -> PyResult<Bound<'py, PyAny>> { Ok(py.None().into_bound(py)) };
    let (out, trace) = match (chain, &inst.0) {
        ("lpn-symplpn", Instance::Lpn(i)) => {
            let eps = match eps {
                Some(e) => rate_text(e)?,
                None => "1/3".into(),
            };
            let cfg = LpnToSympConfig { eps: parse_rational(&eps).map_err(err)?, p: None, q: None };
            let (out, tr) = reductions::lpn_to_symplpn(i, &cfg, rng).map_err(err)?;
            (Instance::Symplpn(out), to_py(py, &tr)?)
        }
        ("symplpn-lsn", Instance::Symplpn(i)) => {
            let (out, tr) = reductions::symplpn_to_lsn_multi(i, k, m, rng).map_err(err)?;
            (Instance::Lsn(out), to_py(py, &tr)?)
        }
        ("lsn-quantum", Instance::Lsn(i)) => {
            (Instance::LsnQuantum(reductions::lsn_quantum_of_classical(i, rng).map_err(err)?), none()?)
        }
        ("lsn-classical", Instance::LsnQuantum(i)) => {
            let conv = reductions::lsn_classical_of_quantum(i, rng).map_err(err)?;
            (Instance::Lsn(conv.instance), to_py(py, &serde_json::json!({ "shift": conv.shift }))?)
        }
        ("rerandomize", Instance::Lsn(i)) => {
            let (out, shift) = reductions::rerandomize_secret(i, rng);
            (Instance::Lsn(out), to_py(py, &serde_json::json!({ "shift": shift }))?)
        }
        ("increase-noise", other) => {
            let target = rate_f64(target.ok_or_else(|| PyValueError::new_err("increase-noise needs target"))?)?;
            let out = match other {
                Instance::Lpn(i) => Instance::Lpn(reductions::increase_noise(i, target, rng).map_err(err)?),
                Instance::Symplpn(i) => Instance::Symplpn(reductions::increase_noise(i, target, rng).map_err(err)?),
                Instance::Lsn(i) => Instance::Lsn(reductions::increase_noise(i, target, rng).map_err(err)?),
                other => return Err(PyValueError::new_err(format!("cannot add noise to {}", other.name()))),
            };
            (out, none()?)
        }
        ("qncp-qsdp", Instance::LsnQuantum(i)) => {
            let s = i.public.samples.first().ok_or_else(|| PyValueError::new_err("instance has no samples"))?;
            let out = reductions::qncp_to_qsdp(&s.clifford, &s.state, i.params.k, w, rng).map_err(err)?;
            (Instance::Qsdp(out), none()?)
        }
        (chain, other) => {
            return Err(PyValueError::new_err(format!("chain {chain:?} does not apply to {}", other.name())))
        }
    };
    Ok((PyInstance(out), trace))
}

/// Exact parameter bookkeeping of the LPN to LSN chain.
#[pyfunction]
fn hardness_chain<'py>(
    py: Python<'py>,
    n: usize,
    p: &Bound<'py, PyAny>,
    eps: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = parse_rational(&rate_text(p)?).map_err(err)?;
    let eps = parse_rational(&rate_text(eps)?).map_err(err)?;
    to_py(py, &reductions::hardness_chain(n, &p, &eps).map_err(err)?)
}

/// Paired structured/unstructured LR trials on native LSN; returns the
/// advantage estimate with its Hoeffding interval.
#[pyfunction]
#[pyo3(signature = (n, p, k=1, m=1, trials=1000, seed=0, alpha=0.05))]
#[allow(clippy::too_many_arguments)]
fn lsn_advantage<'py>(
    py: Python<'py>,
    n: usize,
    p: &Bound<'py, PyAny>,
    k: usize,
    m: usize,
    trials: u64,
    seed: u64,
    alpha: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = DepolParam::new(rate_f64(p)?).map_err(err)?;
    let est = py.detach(move || -> stabnoise::Result<_> {
        let mut hits = [0u64; 2];
        for (arm, structured) in [true, false].into_iter().enumerate() {
            for i in 0..trials {
                let mut rng = trial_rng(seed, arm as u64 * trials + i);
                let inst = problems::sample_lsn_classical(k, n, p, m, structured, &mut rng)?;
                if oracles::lsn_lr_decision(&inst)? {
                    hits[arm] += 1;
                }
            }
        }
        stats::advantage_ci(hits[0], trials, hits[1], trials, alpha)
    });
    to_py(py, &est.map_err(err)?)
}

/// Number of `[[n, k]]` stabilizer codes.
#[pyfunction]
fn count_codes(py: Python<'_>, n: usize, k: usize) -> PyResult<Bound<'_, PyAny>> {
    big_int(py, symplectic::count_codes(n, k).map_err(err)?.to_string())
}

/// Number of ordered isotropic `m`-tuples of independent Paulis on `n` qubits.
#[pyfunction]
fn count_tableaus(py: Python<'_>, n: usize, m: usize) -> PyResult<Bound<'_, PyAny>> {
    big_int(py, symplectic::count_tableaus(n, m).map_err(err)?.to_string())
}

#[pyfunction]
fn sparse_bound(py: Python<'_>, n: usize, k: usize, d: usize) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &symplectic::sparse_bound(n, k, d).map_err(err)?)
}

/// TV distance to uniform after each of `steps` chain steps, started from the
/// weight-`w` class. Exact for small `n`, else Monte Carlo.
#[pyfunction]
#[pyo3(signature = (n, t, w, steps, trajectories=None, seed=0))]
fn tv_curve(
    py: Python<'_>,
    n: usize,
    t: usize,
    w: usize,
    steps: usize,
    trajectories: Option<usize>,
    seed: u64,
) -> PyResult<Vec<f64>> {
    py.detach(move || {
        let cfg = ChainConfig::new(n, t)?;
        let start = mixing::weight_class_start(n, w)?;
        match trajectories {
            None => mixing::exact_tv_curve(&mixing::exact_transition(&cfg)?, &start, steps),
            Some(trajectories) => {
                let mc = MonteCarlo { trajectories, bootstrap: 0, alpha: 0.05, seed };
                Ok(mixing::mc_tv_curve(&cfg, &start, steps, &mc)?.into_iter().map(|e| e.tv).collect())
            }
        }
    })
    .map_err(err)
}

/// Exact mixing times over all weight-class starts.
#[pyfunction]
#[pyo3(signature = (n, t, eps, max_steps=200))]
fn mixing_times(py: Python<'_>, n: usize, t: usize, eps: f64, max_steps: usize) -> PyResult<Bound<'_, PyAny>> {
    let times = py
        .detach(move || {
            let cfg = ChainConfig::new(n, t)?;
            mixing::mixing_times(&cfg, eps, &mixing::all_weight_starts(n), &Method::Exact, max_steps)
        })
        .map_err(err)?;
    to_py(py, &times)
}

#[pyfunction]
fn tv_exact(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    stats::tv_exact(&p, &q).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (successes_s, successes_u, trials, alpha=0.05))]
fn advantage_ci(
    py: Python<'_>,
    successes_s: u64,
    successes_u: u64,
    trials: u64,
    alpha: f64,
) -> PyResult<Bound<'_, PyAny>> {
    if successes_s > trials || successes_u > trials {
        return Err(PyRuntimeError::new_err("more successes than trials"));
    }
    to_py(py, &stats::advantage_ci(successes_s, trials, successes_u, trials, alpha).map_err(err)?)
}

#[pymodule]
fn pystabnoise(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pauli>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(ml_search, m)?)?;
    m.add_function(wrap_pyfunction!(lr_decision, m)?)?;
    m.add_function(wrap_pyfunction!(min_weight, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(hardness_chain, m)?)?;
    m.add_function(wrap_pyfunction!(lsn_advantage, m)?)?;
    m.add_function(wrap_pyfunction!(count_codes, m)?)?;
    m.add_function(wrap_pyfunction!(count_tableaus, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tv_curve, m)?)?;
    m.add_function(wrap_pyfunction!(mixing_times, m)?)?;
    m.add_function(wrap_pyfunction!(tv_exact, m)?)?;
    m.add_function(wrap_pyfunction!(advantage_ci, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn with_module(f: impl FnOnce(Python<'_>, &Bound<'_, PyModule>)) {
        Python::initialize();
        Python::attach(|py| {
            let m = PyModule::new(py, "pystabnoise").unwrap();
            pystabnoise(&m).unwrap();
            f(py, &m);
        });
    }

    #[test]
    fn rates_parse_from_floats_and_strings() {
        with_module(|py, _| {
            let half = 0.5f64.into_pyobject(py).unwrap().into_any();
            assert_eq!(rate_f64(&half).unwrap(), 0.5);
            let frac = PyString::new(py, "3/10").into_any();
            assert_eq!(rate_text(&frac).unwrap(), "3/10");
            assert!((rate_f64(&frac).unwrap() - 0.3).abs() < 1e-15);
        });
    }

    #[test]
    fn module_round_trips_instances() {
        with_module(|py, m| {
            let locals = pyo3::types::PyDict::new(py);
            locals.set_item("sn", m).unwrap();
            let code = CString::new(
                "i = sn.sample('lsn', 4, p=0, m=2, seed=1)\n\
                 ok = sn.ml_search(i) == i.secret and sn.Instance.from_json(i.to_json()).to_json() == i.to_json()",
            )
            .unwrap();
            py.run(&code, None, Some(&locals)).unwrap();
            assert!(locals.get_item("ok").unwrap().unwrap().extract::<bool>().unwrap());
        });
    }
}
