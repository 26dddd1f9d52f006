use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActivationKind {
    /// Binary threshold: 1 at or above the threshold, else 0.
    Step,
    /// Bipolar threshold: +1 at or above the threshold, else -1.
    Signum,
    /// Logistic curve `1/(1+e^{-σx})`.
    Sigmoid,
    /// `tanh(σx)`.
    Tanh,
}

impl ActivationKind {
    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Step => "step",
            ActivationKind::Signum => "signum",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Tanh => "tanh",
        }
    }

    pub fn is_differentiable(self) -> bool {
        matches!(self, ActivationKind::Sigmoid | ActivationKind::Tanh)
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step" => Ok(ActivationKind::Step),
            "signum" => Ok(ActivationKind::Signum),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "tanh" => Ok(ActivationKind::Tanh),
            other => Err(Error::Parameter(format!("unknown activation {other:?}"))),
        }
    }
}

/// An activation function with its steepness and (for the threshold kinds)
/// firing threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activation {
    kind: ActivationKind,
    steepness: f64,
    threshold: f64,
}

impl Activation {
    pub fn new(kind: ActivationKind, steepness: f64, threshold: f64) -> Result<Self> {
        if !(steepness.is_finite() && steepness > 0.0) {
            return Err(Error::Parameter(format!(
                "steepness must be positive and finite, got {steepness}"
            )));
        }
        if !threshold.is_finite() {
            return Err(Error::Parameter(format!("threshold must be finite, got {threshold}")));
        }
        Ok(Activation {
            kind,
            steepness,
            threshold,
        })
    }

    pub fn step(threshold: f64) -> Self {
        Self::new(ActivationKind::Step, 1.0, threshold).expect("finite threshold")
    }

    pub fn signum(threshold: f64) -> Self {
        Self::new(ActivationKind::Signum, 1.0, threshold).expect("finite threshold")
    }

    pub fn sigmoid(steepness: f64) -> Self {
        Self::new(ActivationKind::Sigmoid, steepness, 0.0).expect("positive steepness")
    }

    pub fn tanh(steepness: f64) -> Self {
        Self::new(ActivationKind::Tanh, steepness, 0.0).expect("positive steepness")
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn steepness(&self) -> f64 {
        self.steepness
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_differentiable(&self) -> bool {
        self.kind.is_differentiable()
    }

    /// The two output values of a threshold unit as `(off, on)`, or the open
    /// output range for the smooth kinds.
    pub fn output_range(&self) -> (f64, f64) {
        match self.kind {
            ActivationKind::Step | ActivationKind::Sigmoid => (0.0, 1.0),
            ActivationKind::Signum | ActivationKind::Tanh => (-1.0, 1.0),
        }
    }

    pub fn activate(&self, x: f64) -> f64 {
        match self.kind {
            ActivationKind::Step => {
                if x >= self.threshold {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Signum => {
                if x >= self.threshold {
                    1.0
                } else {
                    -1.0
                }
            }
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-self.steepness * x).exp()),
            ActivationKind::Tanh => (self.steepness * x).tanh(),
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.derivative_from_output(self.activate(x))
    }

    /// Derivative expressed through the unit's output `y = f(x)`:
    /// `σ·y·(1−y)` for the sigmoid and `σ·(1−y²)` for tanh.
    pub fn derivative_from_output(&self, y: f64) -> Result<f64> {
        match self.kind {
            ActivationKind::Sigmoid => Ok(self.steepness * y * (1.0 - y)),
            ActivationKind::Tanh => Ok(self.steepness * (1.0 - y * y)),
            k => Err(Error::NonDifferentiable(k.name())),
        }
    }
}

pub fn activate(a: &Activation, x: f64) -> f64 {
    a.activate(x)
}

pub fn activate_derivative(a: &Activation, x: f64) -> Result<f64> {
    a.derivative(x)
}
