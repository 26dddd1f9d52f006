//! Single-unit perceptron with a bias node, the error-correction training
//! rule and 2-D decision boundaries.
//!
//! A threshold logic unit with fixed weights is just a [`Perceptron`] that is
//! never trained.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::data::Dataset;
use crate::error::{check_dim, Error, Result};
use crate::math::{dot_slices, Activation, ActivationKind, Vector};
use crate::train::{rng_from_seed, Rng, TrainConfig, TrainReport};

/// Constant input of the bias node.
pub const BIAS_INPUT: f64 = -1.0;

/// Weights of freshly initialised models are drawn from `[-INIT_RANGE, INIT_RANGE]`.
pub const INIT_RANGE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Perceptron {
    weights: Vector,
    bias_weight: f64,
    activation: Activation,
}

impl Perceptron {
    /// Only [`ActivationKind::Step`] and [`ActivationKind::Signum`] are accepted.
    pub fn new(weights: Vector, bias_weight: f64, activation: Activation) -> Result<Self> {
        if !matches!(activation.kind(), ActivationKind::Step | ActivationKind::Signum) {
            return Err(Error::Parameter(format!(
                "perceptron needs a step or signum activation, got {}",
                activation.kind()
            )));
        }
        if !bias_weight.is_finite() {
            return Err(Error::NonFinite {
                index: weights.dim(),
                value: bias_weight,
            });
        }
        Ok(Perceptron {
            weights,
            bias_weight,
            activation,
        })
    }

    /// Weights and bias weight uniform in `[-0.5, 0.5]`, drawn in that order.
    pub fn random(dim: usize, activation: Activation, rng: &mut Rng) -> Result<Self> {
        let weights = (0..dim).map(|_| rng.random_range(-INIT_RANGE..=INIT_RANGE)).collect();
        let bias_weight = rng.random_range(-INIT_RANGE..=INIT_RANGE);
        Perceptron::new(Vector::new(weights)?, bias_weight, activation)
    }

    pub fn weights(&self) -> &Vector {
        &self.weights
    }

    pub fn bias_weight(&self) -> f64 {
        self.bias_weight
    }

    pub fn bias_input(&self) -> f64 {
        BIAS_INPUT
    }

    pub fn activation(&self) -> &Activation {
        &self.activation
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    /// Weighted input sum including the bias node.
    pub fn net_input(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        Ok(dot_slices(self.weights.as_slice(), x.as_slice()) + self.bias_weight * BIAS_INPUT)
    }

    pub fn forward(&self, x: &Vector) -> Result<f64> {
        Ok(self.activation.activate(self.net_input(x)?))
    }

    /// One application of `wᵢ ← wᵢ + η(d−y)xᵢ`, with the bias weight updated
    /// against the constant bias input.
    pub fn update_step(&self, x: &Vector, d: f64, eta: f64) -> Result<Perceptron> {
        let mut next = self.clone();
        next.update_in_place(x, d, eta)?;
        Ok(next)
    }

    fn update_in_place(&mut self, x: &Vector, d: f64, eta: f64) -> Result<()> {
        let y = self.forward(x)?;
        let scale = eta * (d - y);
        if scale == 0.0 {
            return Ok(());
        }
        let weights = self
            .weights
            .iter()
            .zip(x.iter())
            .map(|(w, xi)| w + scale * xi)
            .collect();
        self.weights = Vector::new(weights)?;
        self.bias_weight += scale * BIAS_INPUT;
        Ok(())
    }

    /// Sum over samples of `(d−y)²`.
    pub fn sse(&self, data: &Dataset) -> Result<f64> {
        check_dim(self.dim(), data.feature_dim())?;
        data.iter().try_fold(0.0, |acc, s| {
            let e = s.targets[0] - self.forward(&s.features)?;
            Ok(acc + e * e)
        })
    }

    /// Fraction of samples whose output equals the label.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        data.ensure_nonempty()?;
        let mut correct = 0usize;
        for s in data.iter() {
            if self.forward(&s.features)? == s.targets[0] {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len() as f64)
    }

    /// The line where the net input equals the activation threshold.
    pub fn decision_boundary_2d(&self) -> Result<Boundary> {
        check_dim(2, self.dim())?;
        let (w1, w2) = (self.weights[0], self.weights[1]);
        let rhs = self.activation.threshold() - self.bias_weight * BIAS_INPUT;
        if w2 != 0.0 {
            Ok(Boundary::Line {
                slope: -w1 / w2,
                intercept: rhs / w2,
                upper_is_positive: w2 > 0.0,
            })
        } else if w1 != 0.0 {
            Ok(Boundary::Vertical {
                x1: rhs / w1,
                right_is_positive: w1 > 0.0,
            })
        } else {
            Err(Error::DegenerateBoundary)
        }
    }
}

/// Decision line of a two-input perceptron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// `x₂ = slope·x₁ + intercept`; the firing class lies above the line when
    /// `upper_is_positive`.
    Line {
        slope: f64,
        intercept: f64,
        upper_is_positive: bool,
    },
    /// `x₁ = const`; the firing class lies to the right when `right_is_positive`.
    Vertical { x1: f64, right_is_positive: bool },
}

impl Boundary {
    /// Whether `(x1, x2)` lies strictly on the firing side of the line.
    pub fn on_positive_side(&self, x1: f64, x2: f64) -> bool {
        match *self {
            Boundary::Line {
                slope,
                intercept,
                upper_is_positive,
            } => {
                let line = slope * x1 + intercept;
                if upper_is_positive {
                    x2 > line
                } else {
                    x2 < line
                }
            }
            Boundary::Vertical {
                x1: at,
                right_is_positive,
            } => {
                if right_is_positive {
                    x1 > at
                } else {
                    x1 < at
                }
            }
        }
    }

    pub fn is_on_line(&self, x1: f64, x2: f64) -> bool {
        match *self {
            Boundary::Line { slope, intercept, .. } => x2 == slope * x1 + intercept,
            Boundary::Vertical { x1: at, .. } => x1 == at,
        }
    }
}

pub fn perceptron_error(d: f64, y: f64) -> f64 {
    0.5 * (d - y) * (d - y)
}

fn check_labels(data: &Dataset, activation: &Activation) -> Result<()> {
    let (off, on) = activation.output_range();
    let domain = match activation.kind() {
        ActivationKind::Signum => "{-1, +1}",
        _ => "{0, 1}",
    };
    if data.target_dim() != 1 {
        return Err(Error::Parameter(format!(
            "perceptron needs exactly one target column, dataset has {}",
            data.target_dim()
        )));
    }
    for (i, s) in data.iter().enumerate() {
        let label = s.targets[0];
        if label != off && label != on {
            return Err(Error::LabelDomain {
                sample: i,
                label,
                domain,
            });
        }
    }
    Ok(())
}

/// Trains a perceptron one sample at a time until the epoch SSE
/// (`Σ(d−y)²`, measured after the epoch) reaches `cfg.target_error` or
/// `cfg.max_epochs` passes have run.
pub fn train_perceptron(
    data: &Dataset,
    cfg: &TrainConfig,
    activation: Activation,
) -> Result<(Perceptron, TrainReport)> {
    cfg.validate()?;
    data.ensure_nonempty()?;
    check_labels(data, &activation)?;

    let mut rng = rng_from_seed(cfg.seed);
    let mut model = Perceptron::random(data.feature_dim(), activation, &mut rng)?;
    let mut report = TrainReport::new(cfg.target_error);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let samples = data.samples();

    for _ in 0..cfg.max_epochs {
        if cfg.shuffle_each_epoch {
            order.shuffle(&mut rng);
        }
        for &i in &order {
            model.update_in_place(&samples[i].features, samples[i].targets[0], cfg.learning_rate)?;
        }
        if report.push(model.sse(data)?) {
            break;
        }
    }
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_logic, LogicTask};

    fn v(c: &[f64]) -> Vector {
        Vector::try_from(c).unwrap()
    }

    fn and_unit() -> Perceptron {
        Perceptron::new(v(&[1.0, 1.0]), 1.5, Activation::step(0.0)).unwrap()
    }

    #[test]
    fn forward_examples() {
        assert_eq!(and_unit().forward(&v(&[1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(and_unit().forward(&v(&[1.0, 0.0])).unwrap(), 0.0);
        let zero = Perceptron::new(v(&[0.0, 0.0]), 0.0, Activation::step(0.0)).unwrap();
        assert_eq!(zero.forward(&v(&[0.0, 0.0])).unwrap(), 1.0);
        assert!(matches!(
            and_unit().forward(&v(&[1.0])),
            Err(Error::Dimension { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn tlu_computes_and_gate() {
        let unit = and_unit();
        for s in gen_logic(LogicTask::And).iter() {
            assert_eq!(unit.forward(&s.features).unwrap(), s.targets[0]);
        }
    }

    #[test]
    fn error_examples() {
        assert_eq!(perceptron_error(1.0, 1.0), 0.0);
        assert_eq!(perceptron_error(1.0, 0.0), 0.5);
        assert_eq!(perceptron_error(0.0, 1.0), 0.5);
    }

    #[test]
    fn update_examples() {
        // y = d leaves the model alone.
        let unit = and_unit();
        assert_eq!(unit.update_step(&v(&[1.0, 1.0]), 1.0, 0.5).unwrap(), unit);

        // Threshold 0.5 makes the zero model output 0 on (1,1).
        let zero = Perceptron::new(v(&[0.0, 0.0]), 0.0, Activation::step(0.5)).unwrap();
        assert_eq!(zero.forward(&v(&[1.0, 1.0])).unwrap(), 0.0);
        let next = zero.update_step(&v(&[1.0, 1.0]), 1.0, 0.5).unwrap();
        assert_eq!(next.weights().as_slice(), &[0.5, 0.5]);
        assert_eq!(next.bias_weight(), -0.5);

        // Zero inputs only move the bias weight.
        let next = and_unit().update_step(&v(&[0.0, 0.0]), 1.0, 0.5).unwrap();
        assert_eq!(next.weights().as_slice(), &[1.0, 1.0]);
        assert_eq!(next.bias_weight(), 1.0);
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(
            and_unit().decision_boundary_2d().unwrap(),
            Boundary::Line {
                slope: -1.0,
                intercept: 1.5,
                upper_is_positive: true
            }
        );
        let axis = Perceptron::new(v(&[0.0, 1.0]), 0.0, Activation::step(0.0)).unwrap();
        match axis.decision_boundary_2d().unwrap() {
            Boundary::Line { slope, intercept, .. } => {
                assert_eq!(slope, 0.0);
                assert_eq!(intercept, 0.0);
            }
            b => panic!("unexpected {b:?}"),
        }
        let vertical = Perceptron::new(v(&[1.0, 0.0]), 2.0, Activation::step(0.0)).unwrap();
        assert_eq!(
            vertical.decision_boundary_2d().unwrap(),
            Boundary::Vertical {
                x1: 2.0,
                right_is_positive: true
            }
        );
        let flat = Perceptron::new(v(&[0.0, 0.0]), 1.0, Activation::step(0.0)).unwrap();
        assert!(matches!(flat.decision_boundary_2d(), Err(Error::DegenerateBoundary)));
        let three = Perceptron::new(v(&[1.0, 1.0, 1.0]), 0.0, Activation::step(0.0)).unwrap();
        assert!(three.decision_boundary_2d().is_err());
    }

    #[test]
    fn rejects_smooth_activation() {
        assert!(Perceptron::new(v(&[1.0]), 0.0, Activation::sigmoid(1.0)).is_err());
    }

    #[test]
    fn training_rejects_bad_input() {
        let cfg = TrainConfig::default();
        let empty = Dataset::new(2, 1, vec![]).unwrap();
        assert!(matches!(
            train_perceptron(&empty, &cfg, Activation::step(0.0)),
            Err(Error::EmptyData)
        ));
        let xor = gen_logic(LogicTask::Xor);
        assert!(matches!(
            train_perceptron(&xor, &cfg, Activation::signum(0.0)),
            Err(Error::LabelDomain { sample: 0, .. })
        ));
    }

    #[test]
    fn trains_logic_gates() {
        let cfg = TrainConfig {
            learning_rate: 0.1,
            max_epochs: 100,
            seed: 42,
            ..Default::default()
        };
        for task in [LogicTask::And, LogicTask::Or] {
            let data = gen_logic(task);
            let (model, report) = train_perceptron(&data, &cfg, Activation::step(0.0)).unwrap();
            assert!(report.converged, "{task:?}");
            assert_eq!(model.accuracy(&data).unwrap(), 1.0);
            assert_eq!(report.error_curve.len(), report.final_epoch);
        }
    }

    #[test]
    fn signum_training() {
        let rows: Vec<(Vec<f64>, Vec<f64>)> = gen_logic(LogicTask::Or)
            .iter()
            .map(|s| (s.features.as_slice().to_vec(), vec![2.0 * s.targets[0] - 1.0]))
            .collect();
        let refs: Vec<(&[f64], &[f64])> = rows.iter().map(|(a, b)| (a.as_slice(), b.as_slice())).collect();
        let data = Dataset::from_rows(&refs).unwrap();
        let cfg = TrainConfig {
            max_epochs: 200,
            seed: 5,
            shuffle_each_epoch: true,
            ..Default::default()
        };
        let (model, report) = train_perceptron(&data, &cfg, Activation::signum(0.0)).unwrap();
        assert!(report.converged);
        assert_eq!(model.accuracy(&data).unwrap(), 1.0);
    }

    #[test]
    fn xor_does_not_converge() {
        let cfg = TrainConfig {
            max_epochs: 1000,
            seed: 42,
            ..Default::default()
        };
        let (_, report) = train_perceptron(&gen_logic(LogicTask::Xor), &cfg, Activation::step(0.0)).unwrap();
        assert!(!report.converged);
        assert_eq!(report.final_epoch, 1000);
        assert!(report.error_curve.iter().all(|e| e.sse >= 1.0));
    }
}
