//! Python bindings for `ffnet`.
//!
//! Datasets cross the boundary as a pair of row lists,
//! `features: list[list[float]]` and `targets: list[list[float]]`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ffnet::data::{self, Dataset, LogicTask, Sample};
use ffnet::gradcheck;
use ffnet::sweep::{self, SweepGrid};
use ffnet::train::rng_from_seed;
use ffnet::{ActivationKind, Model, TrainConfig};

fn to_py(e: ffnet::Error) -> PyErr {
    match e {
        ffnet::Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn vector(values: Vec<f64>) -> PyResult<ffnet::Vector> {
    ffnet::Vector::new(values).map_err(to_py)
}

fn dataset(features: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> PyResult<Dataset> {
    if features.len() != targets.len() {
        return Err(PyValueError::new_err(format!(
            "{} feature rows but {} target rows",
            features.len(),
            targets.len()
        )));
    }
    let samples = features
        .iter()
        .zip(&targets)
        .map(|(f, t)| Sample::new(f, t))
        .collect::<ffnet::Result<Vec<_>>>()
        .map_err(to_py)?;
    let fdim = features.first().map_or(0, Vec::len);
    let tdim = targets.first().map_or(0, Vec::len);
    Dataset::new(fdim, tdim, samples).map_err(to_py)
}

type Rows = (Vec<Vec<f64>>, Vec<Vec<f64>>);
type LabelledRows = (Vec<Vec<f64>>, Vec<Vec<f64>>, (f64, f64));

fn rows(data: &Dataset) -> Rows {
    data.iter()
        .map(|s| (s.features.as_slice().to_vec(), s.targets.as_slice().to_vec()))
        .unzip()
}

#[pyfunction]
fn dot(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    ffnet::math::dot(&vector(a)?, &vector(b)?).map_err(to_py)
}

#[pyfunction]
fn cosine_angle(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    ffnet::math::cosine_angle(&vector(a)?, &vector(b)?).map_err(to_py)
}

#[pyfunction]
fn project(w: Vec<f64>, x: Vec<f64>) -> PyResult<f64> {
    ffnet::math::project(&vector(w)?, &vector(x)?).map_err(to_py)
}

/// Activation function: `"step"`, `"signum"`, `"sigmoid"` or `"tanh"`.
#[pyclass(name = "Activation", from_py_object)]
#[derive(Clone)]
struct PyActivation(ffnet::Activation);

#[pymethods]
impl PyActivation {
    #[new]
    #[pyo3(signature = (kind, steepness=1.0, threshold=0.0))]
    fn new(kind: &str, steepness: f64, threshold: f64) -> PyResult<Self> {
        let kind: ActivationKind = kind.parse().map_err(to_py)?;
        ffnet::Activation::new(kind, steepness, threshold)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    #[getter]
    fn steepness(&self) -> f64 {
        self.0.steepness()
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.0.threshold()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.activate(x)
    }

    fn activate(&self, x: f64) -> f64 {
        self.0.activate(x)
    }

    /// Raises ValueError for step and signum.
    fn derivative(&self, x: f64) -> PyResult<f64> {
        self.0.derivative(x).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Activation({:?}, steepness={}, threshold={})",
            self.kind(),
            self.0.steepness(),
            self.0.threshold()
        )
    }
}

#[pyclass(name = "TrainReport", frozen)]
struct PyTrainReport(ffnet::TrainReport);

#[pymethods]
impl PyTrainReport {
    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn final_epoch(&self) -> usize {
        self.0.final_epoch
    }

    #[getter]
    fn final_sse(&self) -> Option<f64> {
        self.0.final_sse()
    }

    #[getter]
    fn epochs_to_target(&self) -> Option<usize> {
        self.0.epochs_to_target()
    }

    /// Epoch error after each epoch, starting with epoch 1.
    #[getter]
    fn error_curve(&self) -> Vec<f64> {
        self.0.error_curve.iter().map(|e| e.sse).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "TrainReport(converged={}, final_epoch={}, final_sse={:?})",
            self.0.converged,
            self.0.final_epoch,
            self.0.final_sse()
        )
    }
}

#[pyclass(name = "Perceptron", skip_from_py_object)]
#[derive(Clone)]
struct PyPerceptron(ffnet::Perceptron);

#[pymethods]
impl PyPerceptron {
    #[new]
    #[pyo3(signature = (weights, bias_weight, activation=None))]
    fn new(weights: Vec<f64>, bias_weight: f64, activation: Option<PyActivation>) -> PyResult<Self> {
        let act = activation.map_or(ffnet::Activation::step(0.0), |a| a.0);
        ffnet::Perceptron::new(vector(weights)?, bias_weight, act)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().as_slice().to_vec()
    }

    #[getter]
    fn bias_weight(&self) -> f64 {
        self.0.bias_weight()
    }

    fn forward(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.forward(&vector(x)?).map_err(to_py)
    }

    fn update_step(&self, x: Vec<f64>, d: f64, eta: f64) -> PyResult<Self> {
        self.0.update_step(&vector(x)?, d, eta).map(Self).map_err(to_py)
    }

    fn sse(&self, features: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> PyResult<f64> {
        self.0.sse(&dataset(features, targets)?).map_err(to_py)
    }

    fn accuracy(&self, features: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> PyResult<f64> {
        self.0.accuracy(&dataset(features, targets)?).map_err(to_py)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        Model::Perceptron(self.0.clone()).save(path).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Perceptron(weights={:?}, bias_weight={})",
            self.weights(),
            self.0.bias_weight()
        )
    }
}

#[pyclass(name = "MlpNetwork", skip_from_py_object)]
#[derive(Clone)]
struct PyMlp(ffnet::MlpNetwork);

#[pymethods]
impl PyMlp {
    /// Random sigmoid network with weights in `[-0.5, 0.5]`.
    #[new]
    #[pyo3(signature = (layer_sizes, seed=0))]
    fn new(layer_sizes: Vec<usize>, seed: u64) -> PyResult<Self> {
        ffnet::MlpNetwork::random(&layer_sizes, &mut rng_from_seed(seed))
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        match Model::load(path).map_err(to_py)? {
            Model::Mlp(net) => Ok(Self(net)),
            Model::Perceptron(_) => Err(PyValueError::new_err(format!("{path} holds a perceptron"))),
        }
    }

    fn save(&self, path: &str) -> PyResult<()> {
        Model::Mlp(self.0.clone()).save(path).map_err(to_py)
    }

    #[getter]
    fn layer_sizes(&self) -> Vec<usize> {
        self.0.layer_sizes().to_vec()
    }

    #[getter]
    fn param_count(&self) -> usize {
        self.0.param_count()
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.0.predict(&vector(x)?).map_err(to_py)?.into_inner())
    }

    /// Activations of every layer, input first.
    fn forward(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let trace = self.0.forward(&vector(x)?).map_err(to_py)?;
        Ok(trace.layers.iter().map(|l| l.activation.as_slice().to_vec()).collect())
    }

    fn loss(&self, features: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> PyResult<f64> {
        self.0.loss(&dataset(features, targets)?).map_err(to_py)
    }

    fn accuracy(&self, features: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> PyResult<f64> {
        self.0.accuracy(&dataset(features, targets)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("MlpNetwork(layer_sizes={:?})", self.0.layer_sizes())
    }
}

#[pyfunction]
#[pyo3(signature = (features, targets, learning_rate=0.1, max_epochs=1000, seed=0, shuffle=false, activation=None))]
fn train_perceptron(
    features: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    learning_rate: f64,
    max_epochs: usize,
    seed: u64,
    shuffle: bool,
    activation: Option<PyActivation>,
) -> PyResult<(PyPerceptron, PyTrainReport)> {
    let cfg = TrainConfig {
        learning_rate,
        max_epochs,
        target_error: 0.0,
        seed,
        shuffle_each_epoch: shuffle,
        momentum: 0.0,
    };
    let act = activation.map_or(ffnet::Activation::step(0.0), |a| a.0);
    let (p, report) = ffnet::train_perceptron(&dataset(features, targets)?, &cfg, act).map_err(to_py)?;
    Ok((PyPerceptron(p), PyTrainReport(report)))
}

#[pyfunction]
#[pyo3(signature = (
    features, targets, layer_sizes, learning_rate=0.5, momentum=0.0, max_epochs=10000,
    target_error=0.05, seed=0, shuffle=false,
))]
#[allow(clippy::too_many_arguments)]
fn train_mlp(
    features: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    layer_sizes: Vec<usize>,
    learning_rate: f64,
    momentum: f64,
    max_epochs: usize,
    target_error: f64,
    seed: u64,
    shuffle: bool,
) -> PyResult<(PyMlp, PyTrainReport)> {
    let cfg = TrainConfig {
        learning_rate,
        max_epochs,
        target_error,
        seed,
        shuffle_each_epoch: shuffle,
        momentum,
    };
    let data = dataset(features, targets)?;
    let (net, report) = ffnet::train_mlp(&data, &layer_sizes, &cfg).map_err(to_py)?;
    Ok((PyMlp(net), PyTrainReport(report)))
}

/// Truth table for `"and"`, `"or"` or `"xor"`.
#[pyfunction]
fn gen_logic(task: &str) -> PyResult<Rows> {
    let task: LogicTask = task.parse().map_err(to_py)?;
    Ok(rows(&data::gen_logic(task)))
}

/// Returns `(features, targets, (slope, intercept))`.
#[pyfunction]
#[pyo3(signature = (n=50, margin=0.1, seed=0))]
fn gen_separable_2d(n: usize, margin: f64, seed: u64) -> PyResult<LabelledRows> {
    let (data, line) = data::gen_separable_2d(n, margin, seed).map_err(to_py)?;
    let (f, t) = rows(&data);
    Ok((f, t, (line.slope, line.intercept)))
}

#[pyfunction]
fn load_csv(path: &str, target_dim: usize) -> PyResult<Rows> {
    Ok(rows(&data::load_csv(path, target_dim).map_err(to_py)?))
}

/// Gradient check of `net` at one sample; returns a dict with
/// `max_rel_error`, `pass` and per-parameter `records`.
#[pyfunction]
#[pyo3(signature = (net, x, t, h=gradcheck::DEFAULT_STEP, tol=gradcheck::DEFAULT_TOLERANCE))]
fn grad_check<'py>(
    py: Python<'py>,
    net: &PyMlp,
    x: Vec<f64>,
    t: Vec<f64>,
    h: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = gradcheck::check(&net.0, &vector(x)?, &vector(t)?, h, tol).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("max_rel_error", report.max_rel_error)?;
    out.set_item("pass", report.pass)?;
    let records: Vec<(usize, usize, usize, f64, f64, f64)> = report
        .records
        .iter()
        .map(|r| (r.layer, r.row, r.col, r.analytic, r.numeric, r.rel_error))
        .collect();
    out.set_item("records", records)?;
    Ok(out)
}

/// Grid search; returns one dict per cell, best first.
#[pyfunction]
#[pyo3(signature = (
    features, targets, layer_sizes, learning_rates, momenta=vec![0.0], epoch_caps=vec![10000],
    replicates=5, seed=0, target_error=0.05, shuffle=false,
))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    features: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    layer_sizes: Vec<usize>,
    learning_rates: Vec<f64>,
    momenta: Vec<f64>,
    epoch_caps: Vec<usize>,
    replicates: usize,
    seed: u64,
    target_error: f64,
    shuffle: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let grid = SweepGrid {
        learning_rates,
        momenta,
        epoch_caps,
        seeds_per_cell: replicates,
        base_seed: seed,
        shuffle_each_epoch: shuffle,
    };
    let data = dataset(features, targets)?;
    let result = py
        .detach(|| sweep::run_sweep(&data, &layer_sizes, &grid, target_error))
        .map_err(to_py)?;
    result
        .ranked()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("learning_rate", r.cell.learning_rate)?;
            d.set_item("momentum", r.cell.momentum)?;
            d.set_item("epoch_cap", r.cell.epoch_cap)?;
            d.set_item("median_final_sse", r.median_final_sse)?;
            d.set_item("median_epochs_to_target", r.median_epochs_to_target)?;
            d.set_item("oscillation", r.oscillation)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn ffnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyActivation>()?;
    m.add_class::<PyPerceptron>()?;
    m.add_class::<PyMlp>()?;
    m.add_class::<PyTrainReport>()?;
    m.add_function(wrap_pyfunction!(dot, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_angle, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(train_perceptron, m)?)?;
    m.add_function(wrap_pyfunction!(train_mlp, m)?)?;
    m.add_function(wrap_pyfunction!(gen_logic, m)?)?;
    m.add_function(wrap_pyfunction!(gen_separable_2d, m)?)?;
    m.add_function(wrap_pyfunction!(load_csv, m)?)?;
    m.add_function(wrap_pyfunction!(grad_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
