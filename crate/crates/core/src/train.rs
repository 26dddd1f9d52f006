//! Training configuration and the per-run report shared by the perceptron
//! and the multilayer network.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seeded generator used for every random draw in the crate.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Step size η, in `(0, 1]`.
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Training stops once the epoch error is at or below this value.
    pub target_error: f64,
    pub seed: u64,
    pub shuffle_each_epoch: bool,
    /// Heavy-ball coefficient in `[0, 1)`; ignored by the perceptron.
    pub momentum: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            max_epochs: 1000,
            target_error: 0.0,
            seed: 0,
            shuffle_each_epoch: false,
            momentum: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        validate_learning_rate(self.learning_rate)?;
        validate_momentum(self.momentum)?;
        if !(self.target_error >= 0.0 && self.target_error.is_finite()) {
            return Err(Error::Parameter(format!(
                "target error must be a nonnegative finite number, got {}",
                self.target_error
            )));
        }
        Ok(())
    }
}

pub fn validate_learning_rate(lr: f64) -> Result<()> {
    if lr > 0.0 && lr <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("learning rate must lie in (0, 1], got {lr}")))
    }
}

pub fn validate_momentum(m: f64) -> Result<()> {
    if (0.0..1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("momentum must lie in [0, 1), got {m}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochError {
    pub epoch: usize,
    pub sse: f64,
}

/// Error trajectory and outcome of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// One entry per completed epoch, epochs numbered from 1.
    pub error_curve: Vec<EpochError>,
    pub final_epoch: usize,
    pub converged: bool,
    pub target_error: f64,
}

impl TrainReport {
    pub(crate) fn new(target_error: f64) -> Self {
        TrainReport {
            error_curve: Vec::new(),
            final_epoch: 0,
            converged: false,
            target_error,
        }
    }

    /// Records a completed epoch and returns whether the target was reached.
    pub(crate) fn push(&mut self, sse: f64) -> bool {
        self.final_epoch += 1;
        self.error_curve.push(EpochError {
            epoch: self.final_epoch,
            sse,
        });
        self.converged = sse <= self.target_error;
        self.converged
    }

    pub fn final_sse(&self) -> Option<f64> {
        self.error_curve.last().map(|e| e.sse)
    }

    /// Epoch at which the target was reached, if it was.
    pub fn epochs_to_target(&self) -> Option<usize> {
        self.converged.then_some(self.final_epoch)
    }

    /// `# epoch,sse` header followed by one row per epoch.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("# epoch,sse\n");
        for e in &self.error_curve {
            out.push_str(&format!("{},{}\n", e.epoch, e.sse));
        }
        out
    }
}

/// True when the last `window` epochs changed the error by less than `eps`
/// per epoch while the error is still above the target: the signature of a
/// flat region or local minimum of the error surface.
pub fn is_local_minimum_stalled(report: &TrainReport, window: usize, eps: f64) -> Result<bool> {
    if window < 2 {
        return Err(Error::Parameter(format!("window must be at least 2, got {window}")));
    }
    let curve = &report.error_curve;
    if curve.len() < window {
        return Err(Error::InsufficientHistory {
            len: curve.len(),
            window,
        });
    }
    let tail = &curve[curve.len() - window..];
    let flat = tail.windows(2).all(|w| (w[1].sse - w[0].sse).abs() < eps);
    let above_target = tail[window - 1].sse > report.target_error;
    Ok(flat && above_target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report_from(curve: &[f64], target: f64) -> TrainReport {
        let mut r = TrainReport::new(target);
        for &sse in curve {
            r.push(sse);
        }
        r
    }

    #[test]
    fn config_ranges() {
        assert!(TrainConfig::default().validate().is_ok());
        for lr in [0.0, -0.1, 1.5, f64::NAN] {
            let cfg = TrainConfig {
                learning_rate: lr,
                ..Default::default()
            };
            assert!(cfg.validate().is_err(), "lr {lr}");
        }
        let cfg = TrainConfig {
            learning_rate: 1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_ok());
        for m in [1.0, -0.01] {
            let cfg = TrainConfig {
                momentum: m,
                ..Default::default()
            };
            assert!(cfg.validate().is_err(), "momentum {m}");
        }
    }

    #[test]
    fn stalled_examples() {
        let decreasing: Vec<f64> = (0..20).map(|i| 10.0 - i as f64).collect();
        assert!(!is_local_minimum_stalled(&report_from(&decreasing, 0.01), 10, 1e-12).unwrap());

        let constant = vec![1.0; 20];
        assert!(is_local_minimum_stalled(&report_from(&constant, 0.01), 10, 1e-9).unwrap());

        let mut flat_then_down = vec![2.0; 5];
        flat_then_down.extend((1..=10).map(|i| 2.0 - 0.1 * i as f64));
        assert!(!is_local_minimum_stalled(&report_from(&flat_then_down, 0.01), 10, 1e-9).unwrap());

        // Flat but already at the target is convergence, not a stall.
        assert!(!is_local_minimum_stalled(&report_from(&[0.0; 12], 0.01), 10, 1e-9).unwrap());
    }

    #[test]
    fn stalled_needs_history() {
        let r = report_from(&[1.0; 5], 0.0);
        assert!(matches!(
            is_local_minimum_stalled(&r, 10, 1e-9),
            Err(Error::InsufficientHistory { len: 5, window: 10 })
        ));
        assert!(is_local_minimum_stalled(&r, 1, 1e-9).is_err());
    }

    #[test]
    fn push_tracks_convergence() {
        let r = report_from(&[3.0, 1.0, 0.5], 0.5);
        assert!(r.converged);
        assert_eq!(r.final_epoch, 3);
        assert_eq!(r.epochs_to_target(), Some(3));
        assert_eq!(r.curve_csv(), "# epoch,sse\n1,3\n2,1\n3,0.5\n");
    }
}
