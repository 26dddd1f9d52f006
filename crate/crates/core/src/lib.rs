//! Feedforward neural networks built from first principles: vector algebra,
//! threshold and sigmoid units, perceptron training, multilayer
//! backpropagation with momentum, finite-difference gradient checks and
//! learning-rate sweeps. Every random draw is seeded, so training runs are
//! reproducible bit for bit.

pub mod data;
pub mod error;
pub mod gradcheck;
pub mod math;
pub mod mlp;
pub mod model;
pub mod perceptron;
pub mod sweep;
pub mod train;

pub use data::{Dataset, LogicTask, Sample};
pub use error::{Error, Result};
pub use math::{Activation, ActivationKind, Vector};
pub use mlp::{train_mlp, ForwardTrace, Gradients, MlpNetwork};
pub use model::Model;
pub use perceptron::{train_perceptron, Perceptron};
pub use train::{TrainConfig, TrainReport};
