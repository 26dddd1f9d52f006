//! Fully connected feedforward network trained by backpropagation.
//!
//! Each non-input layer `ℓ` owns an augmented weight matrix of shape
//! `(fan_in + 1) × fan_out`: rows `0..fan_in` hold the connection weights
//! `w[i][j]` from unit `i` of the previous layer to unit `j`, and the last
//! row holds the bias weights, which see the constant bias input `-1`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::data::Dataset;
use crate::error::{check_dim, Error, Result};
use crate::math::{Activation, Vector};
use crate::perceptron::{BIAS_INPUT, INIT_RANGE};
use crate::train::{rng_from_seed, Rng, TrainConfig, TrainReport};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Location of one trainable parameter. `row == fan_in` addresses the bias
/// weight of unit `col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamIndex {
    pub layer: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpNetwork {
    layer_sizes: Vec<usize>,
    layers: Vec<Matrix>,
    hidden_activation: Activation,
    output_activation: Activation,
}

fn validate_layer_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 3 {
        return Err(Error::Parameter(format!(
            "a multilayer network needs input, at least one hidden, and output layer; got {} layer(s)",
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::Parameter("layer sizes must be positive".into()));
    }
    Ok(())
}

impl MlpNetwork {
    /// Builds a network from augmented layer matrices (bias weights in the
    /// last row of each).
    pub fn from_layers(
        layer_sizes: &[usize],
        layers: Vec<Matrix>,
        hidden_activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        validate_layer_sizes(layer_sizes)?;
        check_dim(layer_sizes.len() - 1, layers.len())?;
        for (l, m) in layers.iter().enumerate() {
            check_dim(layer_sizes[l] + 1, m.rows())?;
            check_dim(layer_sizes[l + 1], m.cols())?;
            if let Some((index, &value)) = m.as_slice().iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { index, value });
            }
        }
        for a in [hidden_activation, output_activation] {
            if !a.is_differentiable() {
                return Err(Error::NonDifferentiable(a.kind().name()));
            }
        }
        Ok(MlpNetwork {
            layer_sizes: layer_sizes.to_vec(),
            layers,
            hidden_activation,
            output_activation,
        })
    }

    /// All weights set to `value`, sigmoid units with unit steepness.
    pub fn constant(layer_sizes: &[usize], value: f64) -> Result<Self> {
        validate_layer_sizes(layer_sizes)?;
        let layers = layer_sizes
            .windows(2)
            .map(|w| Matrix {
                rows: w[0] + 1,
                cols: w[1],
                data: vec![value; (w[0] + 1) * w[1]],
            })
            .collect();
        let s = Activation::sigmoid(1.0);
        Self::from_layers(layer_sizes, layers, s, s)
    }

    /// Sigmoid network with every weight uniform in `[-range, range]`, drawn
    /// layer by layer in row-major order.
    pub fn random_in(layer_sizes: &[usize], range: f64, rng: &mut Rng) -> Result<Self> {
        let mut net = Self::constant(layer_sizes, 0.0)?;
        for m in &mut net.layers {
            for w in m.as_mut_slice() {
                *w = rng.random_range(-range..=range);
            }
        }
        Ok(net)
    }

    /// The training initialisation: uniform in `[-0.5, 0.5]`.
    pub fn random(layer_sizes: &[usize], rng: &mut Rng) -> Result<Self> {
        Self::random_in(layer_sizes, INIT_RANGE, rng)
    }

    pub fn with_activations(mut self, hidden: Activation, output: Activation) -> Result<Self> {
        for a in [hidden, output] {
            if !a.is_differentiable() {
                return Err(Error::NonDifferentiable(a.kind().name()));
            }
        }
        self.hidden_activation = hidden;
        self.output_activation = output;
        Ok(self)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// Augmented matrix feeding layer `l + 1`.
    pub fn layer(&self, l: usize) -> &Matrix {
        &self.layers[l]
    }

    pub fn layers(&self) -> &[Matrix] {
        &self.layers
    }

    pub fn weight(&self, l: usize, from: usize, to: usize) -> f64 {
        debug_assert!(from < self.layer_sizes[l]);
        self.layers[l].get(from, to)
    }

    pub fn bias_weight(&self, l: usize, unit: usize) -> f64 {
        self.layers[l].get(self.layer_sizes[l], unit)
    }

    pub fn bias_input(&self) -> f64 {
        BIAS_INPUT
    }

    pub fn hidden_activation(&self) -> &Activation {
        &self.hidden_activation
    }

    pub fn output_activation(&self) -> &Activation {
        &self.output_activation
    }

    /// Activation of the units in layer `l` (`l ≥ 1`).
    pub fn activation_of(&self, l: usize) -> &Activation {
        if l + 1 == self.layer_sizes.len() {
            &self.output_activation
        } else {
            &self.hidden_activation
        }
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|m| m.as_slice().len()).sum()
    }

    /// Every parameter location in storage order.
    pub fn param_indices(&self) -> impl Iterator<Item = ParamIndex> + '_ {
        self.layers.iter().enumerate().flat_map(|(layer, m)| {
            (0..m.rows()).flat_map(move |row| (0..m.cols()).map(move |col| ParamIndex { layer, row, col }))
        })
    }

    pub fn param(&self, p: ParamIndex) -> f64 {
        self.layers[p.layer].get(p.row, p.col)
    }

    pub fn set_param(&mut self, p: ParamIndex, value: f64) {
        self.layers[p.layer].set(p.row, p.col, value);
    }

    pub fn forward(&self, x: &Vector) -> Result<ForwardTrace> {
        check_dim(self.input_dim(), x.dim())?;
        let mut layers = Vec::with_capacity(self.layer_sizes.len());
        layers.push(LayerTrace {
            pre_activation: x.clone(),
            activation: x.clone(),
        });
        for (l, m) in self.layers.iter().enumerate() {
            let act = self.activation_of(l + 1);
            let input = layers[l].activation.as_slice();
            let fan_in = input.len();
            let mut pre = Vec::with_capacity(m.cols());
            for j in 0..m.cols() {
                let mut sum = 0.0;
                for (i, a) in input.iter().enumerate() {
                    sum += a * m.get(i, j);
                }
                sum += m.get(fan_in, j) * BIAS_INPUT;
                pre.push(sum);
            }
            let post = pre.iter().map(|&z| act.activate(z)).collect();
            layers.push(LayerTrace {
                pre_activation: Vector::from_raw(pre),
                activation: Vector::from_raw(post),
            });
        }
        Ok(ForwardTrace { layers })
    }

    pub fn predict(&self, x: &Vector) -> Result<Vector> {
        Ok(self.forward(x)?.output().clone())
    }

    /// `(t_k − y_k)·f′(y_k)`; for unit-steepness sigmoid outputs this is
    /// `(t_k − y_k)·y_k·(1 − y_k)`.
    pub fn output_delta(&self, t: &Vector, y: &Vector) -> Result<Vector> {
        check_dim(t.dim(), y.dim())?;
        let act = &self.output_activation;
        let delta = t
            .iter()
            .zip(y.iter())
            .map(|(&tk, &yk)| Ok((tk - yk) * act.derivative_from_output(yk)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Vector::from_raw(delta))
    }

    /// Error signal of hidden layer `layer` given its activations `a` and the
    /// deltas of the layer above: `f′(a_j)·Σ_k w[j][k]·δ_k`.
    pub fn hidden_delta(&self, layer: usize, a: &Vector, downstream: &Vector) -> Result<Vector> {
        if layer == 0 || layer + 1 >= self.layer_sizes.len() {
            return Err(Error::Parameter(format!(
                "layer {layer} is not a hidden layer of a {}-layer network",
                self.layer_sizes.len()
            )));
        }
        let m = &self.layers[layer];
        check_dim(self.layer_sizes[layer], a.dim())?;
        check_dim(m.cols(), downstream.dim())?;
        let act = self.activation_of(layer);
        let delta = a
            .iter()
            .enumerate()
            .map(|(j, &aj)| {
                let blame: f64 = m.row(j).iter().zip(downstream.iter()).map(|(w, d)| w * d).sum();
                Ok(act.derivative_from_output(aj)? * blame)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Vector::from_raw(delta))
    }

    /// Deltas for every non-input layer, index `l - 1` holding layer `l`.
    pub fn deltas(&self, trace: &ForwardTrace, t: &Vector) -> Result<Vec<Vector>> {
        check_dim(self.output_dim(), t.dim())?;
        let depth = self.layer_sizes.len();
        let mut deltas = vec![self.output_delta(t, trace.output())?];
        for l in (1..depth - 1).rev() {
            let downstream = deltas.last().unwrap();
            let d = self.hidden_delta(l, &trace.layers[l].activation, downstream)?;
            deltas.push(d);
        }
        deltas.reverse();
        Ok(deltas)
    }

    /// Gradient of `E = ½Σ(t−y)²` for one sample. A weight from unit `j`
    /// into unit `k` gets `−δ_k·a_j`; bias weights use the bias input in
    /// place of `a_j`.
    pub fn backprop_gradients(&self, x: &Vector, t: &Vector) -> Result<Gradients> {
        let trace = self.forward(x)?;
        let deltas = self.deltas(&trace, t)?;
        Ok(Gradients::from_deltas(&trace, &deltas))
    }

    pub fn sample_loss(&self, x: &Vector, t: &Vector) -> Result<f64> {
        check_dim(self.output_dim(), t.dim())?;
        let trace = self.forward(x)?;
        Ok(half_squared_error(t, trace.output()))
    }

    /// `Σ_samples Σ_k ½(t_k − y_k)²`.
    pub fn loss(&self, data: &Dataset) -> Result<f64> {
        check_dim(self.input_dim(), data.feature_dim())?;
        check_dim(self.output_dim(), data.target_dim())?;
        data.iter()
            .try_fold(0.0, |acc, s| Ok(acc + self.sample_loss(&s.features, &s.targets)?))
    }

    /// Fraction of samples whose outputs, thresholded at the middle of the
    /// output range, all match the thresholded targets.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        data.ensure_nonempty()?;
        check_dim(self.output_dim(), data.target_dim())?;
        let (lo, hi) = self.output_activation.output_range();
        let mid = 0.5 * (lo + hi);
        let mut correct = 0usize;
        for s in data.iter() {
            let y = self.predict(&s.features)?;
            if y.iter()
                .zip(s.targets.iter())
                .all(|(&yk, &tk)| (yk >= mid) == (tk >= mid))
            {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }

    /// `w ← w + step` for every parameter.
    pub(crate) fn apply(&mut self, step: &Gradients) {
        for (m, s) in self.layers.iter_mut().zip(&step.layers) {
            for (w, d) in m.as_mut_slice().iter_mut().zip(s.as_slice()) {
                *w += d;
            }
        }
    }

    /// Plain gradient step `w ← w − η·g`.
    pub fn descend(&mut self, grads: &Gradients, learning_rate: f64) {
        for (m, g) in self.layers.iter_mut().zip(&grads.layers) {
            for (w, gi) in m.as_mut_slice().iter_mut().zip(g.as_slice()) {
                *w -= learning_rate * gi;
            }
        }
    }
}

fn half_squared_error(t: &Vector, y: &Vector) -> f64 {
    t.iter().zip(y.iter()).map(|(a, b)| 0.5 * (a - b) * (a - b)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    pub pre_activation: Vector,
    pub activation: Vector,
}

/// Pre-activations and activations of every layer for one input, the input
/// layer first (where both equal the input).
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub layers: Vec<LayerTrace>,
}

impl ForwardTrace {
    pub fn output(&self) -> &Vector {
        &self.layers.last().unwrap().activation
    }

    pub fn hidden(&self) -> impl Iterator<Item = &Vector> {
        let n = self.layers.len();
        self.layers[1..n - 1].iter().map(|l| &l.activation)
    }
}

/// Per-parameter values shaped like a network's augmented layer matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Matrix>,
}

impl Gradients {
    pub fn zeros_like(net: &MlpNetwork) -> Self {
        Gradients {
            layers: net.layers.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect(),
        }
    }

    /// Assembles `−δ_k·a_j` (and `−δ_k·bias_input` for bias rows) from a
    /// forward trace and per-layer deltas.
    pub fn from_deltas(trace: &ForwardTrace, deltas: &[Vector]) -> Self {
        let layers = deltas
            .iter()
            .enumerate()
            .map(|(l, delta)| {
                let input = trace.layers[l].activation.as_slice();
                let mut g = Matrix::zeros(input.len() + 1, delta.dim());
                for (k, &dk) in delta.iter().enumerate() {
                    for (j, &aj) in input.iter().enumerate() {
                        g.set(j, k, -dk * aj);
                    }
                    g.set(input.len(), k, -dk * BIAS_INPUT);
                }
                g
            })
            .collect();
        Gradients { layers }
    }

    pub fn get(&self, p: ParamIndex) -> f64 {
        self.layers[p.layer].get(p.row, p.col)
    }

    pub fn set(&mut self, p: ParamIndex, v: f64) {
        self.layers[p.layer].set(p.row, p.col, v);
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (m, o) in self.layers.iter_mut().zip(&other.layers) {
            for (a, b) in m.as_mut_slice().iter_mut().zip(o.as_slice()) {
                *a += b;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|m| m.as_slice())
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

/// Heavy-ball update state: `Δw_t = −η·g + α·Δw_{t−1}`.
#[derive(Debug, Clone)]
pub struct Momentum {
    learning_rate: f64,
    coefficient: f64,
    velocity: Gradients,
}

impl Momentum {
    pub fn new(net: &MlpNetwork, learning_rate: f64, coefficient: f64) -> Self {
        Momentum {
            learning_rate,
            coefficient,
            velocity: Gradients::zeros_like(net),
        }
    }

    pub fn step(&mut self, net: &mut MlpNetwork, grads: &Gradients) {
        for (v, g) in self.velocity.layers.iter_mut().zip(&grads.layers) {
            for (vi, gi) in v.as_mut_slice().iter_mut().zip(g.as_slice()) {
                *vi = -self.learning_rate * gi + self.coefficient * *vi;
            }
        }
        net.apply(&self.velocity);
    }
}

fn check_targets(data: &Dataset, act: &Activation) -> Result<()> {
    let (lo, hi) = act.output_range();
    let domain = if lo == 0.0 { "[0, 1]" } else { "[-1, 1]" };
    for (i, s) in data.iter().enumerate() {
        if let Some(&label) = s.targets.iter().find(|&&t| t < lo || t > hi) {
            return Err(Error::LabelDomain {
                sample: i,
                label,
                domain,
            });
        }
    }
    Ok(())
}

/// Checks that `data` fits a network with the given layer sizes.
pub fn check_data_shape(data: &Dataset, layer_sizes: &[usize]) -> Result<()> {
    validate_layer_sizes(layer_sizes)?;
    check_dim(layer_sizes[0], data.feature_dim())?;
    check_dim(*layer_sizes.last().unwrap(), data.target_dim())
}

/// Per-sample backpropagation with optional momentum. The epoch error is the
/// loss over the whole dataset measured after each epoch.
pub fn train_mlp(data: &Dataset, layer_sizes: &[usize], cfg: &TrainConfig) -> Result<(MlpNetwork, TrainReport)> {
    cfg.validate()?;
    data.ensure_nonempty()?;
    check_data_shape(data, layer_sizes)?;

    let mut rng = rng_from_seed(cfg.seed);
    let net = MlpNetwork::random(layer_sizes, &mut rng)?;
    train_from(net, data, cfg, &mut rng)
}

/// Continues training an existing network. `rng` drives sample shuffling.
pub fn train_from(
    mut net: MlpNetwork,
    data: &Dataset,
    cfg: &TrainConfig,
    rng: &mut Rng,
) -> Result<(MlpNetwork, TrainReport)> {
    cfg.validate()?;
    data.ensure_nonempty()?;
    check_data_shape(data, net.layer_sizes())?;
    check_targets(data, &net.output_activation)?;

    let mut report = TrainReport::new(cfg.target_error);
    let mut optimizer = Momentum::new(&net, cfg.learning_rate, cfg.momentum);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let samples = data.samples();

    for _ in 0..cfg.max_epochs {
        if cfg.shuffle_each_epoch {
            order.shuffle(rng);
        }
        for &i in &order {
            let grads = net.backprop_gradients(&samples[i].features, &samples[i].targets)?;
            optimizer.step(&mut net, &grads);
        }
        if report.push(net.loss(data)?) {
            break;
        }
    }
    Ok((net, report))
}

impl fmt::Display for MlpNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.layer_sizes.iter().map(usize::to_string).collect();
        write!(f, "MlpNetwork({})", sizes.join("-"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_logic, LogicTask};

    fn v(c: &[f64]) -> Vector {
        Vector::try_from(c).unwrap()
    }

    #[test]
    fn forward_zero_network_is_half_everywhere() {
        let net = MlpNetwork::constant(&[3, 4, 2], 0.0).unwrap();
        let trace = net.forward(&v(&[0.3, -2.0, 7.0])).unwrap();
        for l in &trace.layers[1..] {
            assert!(l.activation.iter().all(|&a| a == 0.5));
        }
    }

    #[test]
    fn forward_all_ones_2_2_1() {
        // Bias weights zero, connection weights one.
        let mut net = MlpNetwork::constant(&[2, 2, 1], 1.0).unwrap();
        for (l, unit) in [(0, 0), (0, 1), (1, 0)] {
            net.set_param(
                ParamIndex {
                    layer: l,
                    row: net.layer_sizes()[l],
                    col: unit,
                },
                0.0,
            );
        }
        let trace = net.forward(&v(&[0.0, 0.0])).unwrap();
        assert_eq!(trace.layers[1].activation.as_slice(), &[0.5, 0.5]);
        let expected = 1.0 / (1.0 + (-1.0f64).exp());
        assert_eq!(trace.output()[0], expected);
        assert!((expected - 0.731_058_578_630_004_9).abs() < 1e-15);
    }

    #[test]
    fn forward_shapes_3_4_3() {
        let net = MlpNetwork::random(&[3, 4, 3], &mut rng_from_seed(1)).unwrap();
        let trace = net.forward(&v(&[1.0, 2.0, 3.0])).unwrap();
        let dims: Vec<usize> = trace.layers.iter().map(|l| l.activation.dim()).collect();
        assert_eq!(dims, vec![3, 4, 3]);
        assert_eq!(trace.layers.len(), net.layer_sizes().len());
        assert!(net.forward(&v(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn network_shape_invariants() {
        assert!(MlpNetwork::constant(&[2, 1], 0.0).is_err());
        assert!(MlpNetwork::constant(&[2, 0, 1], 0.0).is_err());
        let net = MlpNetwork::constant(&[2, 3, 1], 0.0).unwrap();
        assert_eq!(net.param_count(), 3 * 3 + 4);
        assert_eq!(net.param_indices().count(), net.param_count());
        assert!(net
            .with_activations(Activation::step(0.0), Activation::sigmoid(1.0))
            .is_err());
    }

    #[test]
    fn output_delta_examples() {
        let net = MlpNetwork::constant(&[1, 1, 1], 0.0).unwrap();
        assert_eq!(net.output_delta(&v(&[0.3]), &v(&[0.3])).unwrap().as_slice(), &[0.0]);
        assert_eq!(net.output_delta(&v(&[1.0]), &v(&[0.5])).unwrap().as_slice(), &[0.125]);
        assert_eq!(net.output_delta(&v(&[0.0]), &v(&[0.5])).unwrap().as_slice(), &[-0.125]);
        assert!(net.output_delta(&v(&[0.0, 1.0]), &v(&[0.5])).is_err());
    }

    #[test]
    fn hidden_delta_examples() {
        let mut net = MlpNetwork::constant(&[1, 1, 1], 0.0).unwrap();
        net.set_param(
            ParamIndex {
                layer: 1,
                row: 0,
                col: 0,
            },
            2.0,
        );
        assert!((net.hidden_delta(1, &v(&[0.5]), &v(&[0.1])).unwrap()[0] - 0.05).abs() < 1e-17);
        assert_eq!(net.hidden_delta(1, &v(&[0.5]), &v(&[0.0])).unwrap()[0], 0.0);
        assert_eq!(net.hidden_delta(1, &v(&[1.0]), &v(&[0.3])).unwrap()[0], 0.0);
        assert_eq!(net.hidden_delta(1, &v(&[0.0]), &v(&[0.3])).unwrap()[0], 0.0);
        assert!(net.hidden_delta(0, &v(&[0.5]), &v(&[0.1])).is_err());
        assert!(net.hidden_delta(2, &v(&[0.5]), &v(&[0.1])).is_err());
        assert!(net.hidden_delta(1, &v(&[0.5, 0.5]), &v(&[0.1])).is_err());
    }

    #[test]
    fn zero_outgoing_weights_get_no_blame() {
        let mut net = MlpNetwork::random(&[2, 3, 2], &mut rng_from_seed(3)).unwrap();
        for k in 0..2 {
            net.set_param(
                ParamIndex {
                    layer: 1,
                    row: 1,
                    col: k,
                },
                0.0,
            );
        }
        let d = net.hidden_delta(1, &v(&[0.2, 0.6, 0.9]), &v(&[0.4, -0.7])).unwrap();
        assert_eq!(d[1], 0.0);
        assert_ne!(d[0], 0.0);
    }

    #[test]
    fn bias_gradient_by_hand() {
        // y = 0.5, δ_o = (1 − 0.5)·0.25 = 0.125, ∂E/∂b = −δ_o·(−1).
        let net = MlpNetwork::constant(&[2, 2, 1], 0.0).unwrap();
        let g = net.backprop_gradients(&v(&[1.0, 1.0]), &v(&[1.0])).unwrap();
        assert_eq!(
            g.get(ParamIndex {
                layer: 1,
                row: 2,
                col: 0
            }),
            0.125
        );
        assert_eq!(
            g.get(ParamIndex {
                layer: 1,
                row: 0,
                col: 0
            }),
            -0.0625
        );
        // Output weights are zero, so no blame reaches the hidden layer.
        assert!(g.layers[0].as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn perfect_target_has_zero_gradient() {
        let net = MlpNetwork::random(&[2, 3, 2], &mut rng_from_seed(8)).unwrap();
        let x = v(&[0.1, 0.9]);
        let y = net.predict(&x).unwrap();
        let g = net.backprop_gradients(&x, &y).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn loss_examples() {
        let net = MlpNetwork::constant(&[2, 2, 1], 0.0).unwrap();
        assert_eq!(net.loss(&gen_logic(LogicTask::Xor)).unwrap(), 0.5);
        let half = Dataset::from_rows(&[(&[0.0, 0.0], &[0.5])]).unwrap();
        assert_eq!(net.loss(&half).unwrap(), 0.0);
        let one = Dataset::from_rows(&[(&[0.0], &[1.0])]).unwrap();
        assert!(net.loss(&one).is_err());
    }

    #[test]
    fn zero_epochs_returns_initialisation() {
        let cfg = TrainConfig {
            max_epochs: 0,
            seed: 9,
            ..Default::default()
        };
        let (net, report) = train_mlp(&gen_logic(LogicTask::Xor), &[2, 2, 1], &cfg).unwrap();
        assert!(report.error_curve.is_empty());
        assert!(!report.converged);
        assert_eq!(net, MlpNetwork::random(&[2, 2, 1], &mut rng_from_seed(9)).unwrap());
    }

    #[test]
    fn trains_and_gate() {
        let cfg = TrainConfig {
            learning_rate: 0.5,
            max_epochs: 10_000,
            target_error: 0.05,
            seed: 1,
            ..Default::default()
        };
        let data = gen_logic(LogicTask::And);
        let (net, report) = train_mlp(&data, &[2, 2, 1], &cfg).unwrap();
        assert!(report.converged);
        assert_eq!(net.accuracy(&data).unwrap(), 1.0);
        assert_eq!(report.final_sse(), Some(net.loss(&data).unwrap()));
    }

    #[test]
    fn training_rejects_bad_shapes_and_targets() {
        let cfg = TrainConfig::default();
        let xor = gen_logic(LogicTask::Xor);
        assert!(matches!(
            train_mlp(&xor, &[3, 2, 1], &cfg),
            Err(Error::Dimension { .. })
        ));
        assert!(train_mlp(&xor, &[2, 1], &cfg).is_err());
        let empty = Dataset::new(2, 1, vec![]).unwrap();
        assert!(matches!(train_mlp(&empty, &[2, 2, 1], &cfg), Err(Error::EmptyData)));
        let bipolar = Dataset::from_rows(&[(&[0.0, 0.0], &[-1.0])]).unwrap();
        assert!(matches!(
            train_mlp(&bipolar, &[2, 2, 1], &cfg),
            Err(Error::LabelDomain { .. })
        ));
    }

    #[test]
    fn tanh_network_accepts_bipolar_targets() {
        let data = Dataset::from_rows(&[(&[0.0, 0.0], &[-1.0]), (&[1.0, 1.0], &[1.0])]).unwrap();
        let net = MlpNetwork::random(&[2, 2, 1], &mut rng_from_seed(2))
            .unwrap()
            .with_activations(Activation::tanh(1.0), Activation::tanh(1.0))
            .unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.2,
            max_epochs: 2000,
            target_error: 0.01,
            ..Default::default()
        };
        let (net, report) = train_from(net, &data, &cfg, &mut rng_from_seed(0)).unwrap();
        assert!(report.converged);
        assert_eq!(net.accuracy(&data).unwrap(), 1.0);
    }
}
