//! Vector algebra and activation functions.

mod activation;
mod vector;

pub use activation::{activate, activate_derivative, Activation, ActivationKind};
pub use vector::{cosine_angle, dot, project, Vector};

pub(crate) use vector::dot_slices;
