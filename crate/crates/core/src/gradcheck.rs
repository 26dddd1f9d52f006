//! Finite-difference verification of backpropagation gradients.
//!
//! [`numeric_gradient`] perturbs one parameter at a time and only ever calls
//! [`MlpNetwork::sample_loss`]; it shares no code with the delta recursion it
//! checks.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::math::Vector;
use crate::mlp::{Gradients, MlpNetwork, ParamIndex};

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_TOLERANCE: f64 = 1e-5;

/// Central-difference estimate `(E(w+h) − E(w−h)) / 2h` of every parameter's
/// gradient.
pub fn numeric_gradient(net: &MlpNetwork, x: &Vector, t: &Vector, h: f64) -> Result<Gradients> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!("step size must be positive, got {h}")));
    }
    check_dim(net.input_dim(), x.dim())?;
    check_dim(net.output_dim(), t.dim())?;

    let indices: Vec<ParamIndex> = net.param_indices().collect();
    let values = indices
        .par_iter()
        .map(|&p| {
            let mut probe = net.clone();
            let w = net.param(p);
            probe.set_param(p, w + h);
            let up = probe.sample_loss(x, t)?;
            probe.set_param(p, w - h);
            let down = probe.sample_loss(x, t)?;
            Ok((up - down) / (2.0 * h))
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut grads = Gradients::zeros_like(net);
    for (p, g) in indices.into_iter().zip(values) {
        grads.set(p, g);
    }
    Ok(grads)
}

/// `|a − n| / max(1, |a| + |n|)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradRecord {
    pub layer: usize,
    pub row: usize,
    pub col: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub records: Vec<GradRecord>,
    pub max_rel_error: f64,
    pub pass: bool,
    pub step_size: f64,
    pub tolerance: f64,
}

impl GradCheckReport {
    /// `layer,row,col,analytic,numeric,rel_error` rows followed by a
    /// `# max_rel_error=…,tolerance=…,step=…,pass=…` summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,row,col,analytic,numeric,rel_error\n");
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.layer, r.row, r.col, r.analytic, r.numeric, r.rel_error
            )
            .unwrap();
        }
        writeln!(
            out,
            "# max_rel_error={},tolerance={},step={},pass={}",
            self.max_rel_error, self.tolerance, self.step_size, self.pass
        )
        .unwrap();
        out
    }
}

/// Compares [`MlpNetwork::backprop_gradients`] against [`numeric_gradient`].
pub fn check(net: &MlpNetwork, x: &Vector, t: &Vector, h: f64, tol: f64) -> Result<GradCheckReport> {
    check_with(net, x, t, h, tol, |n, x, t| n.backprop_gradients(x, t))
}

/// Like [`check`] but with a caller-supplied analytic gradient.
pub fn check_with<F>(net: &MlpNetwork, x: &Vector, t: &Vector, h: f64, tol: f64, analytic: F) -> Result<GradCheckReport>
where
    F: Fn(&MlpNetwork, &Vector, &Vector) -> Result<Gradients>,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let numeric = numeric_gradient(net, x, t, h)?;
    let analytic = analytic(net, x, t)?;
    let records: Vec<GradRecord> = net
        .param_indices()
        .map(|p| {
            let (a, n) = (analytic.get(p), numeric.get(p));
            GradRecord {
                layer: p.layer,
                row: p.row,
                col: p.col,
                analytic: a,
                numeric: n,
                rel_error: relative_error(a, n),
            }
        })
        .collect();
    let max_rel_error = records.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    Ok(GradCheckReport {
        records,
        max_rel_error,
        pass: max_rel_error < tol,
        step_size: h,
        tolerance: tol,
    })
}

/// Deliberately broken backward passes that a working gradient check must
/// reject.
pub mod mutants {
    use super::*;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Mutant {
        /// Output delta computed as `(y − t)·f′` instead of `(t − y)·f′`.
        FlippedOutputSign,
        /// Sigmoid derivative factor dropped from every delta.
        MissingDerivative,
        /// Hidden deltas read `w[k][j]` instead of `w[j][k]`; needs square
        /// hidden-to-next matrices.
        TransposedHiddenWeights,
    }

    pub const ALL: [Mutant; 3] = [
        Mutant::FlippedOutputSign,
        Mutant::MissingDerivative,
        Mutant::TransposedHiddenWeights,
    ];

    pub fn gradients(net: &MlpNetwork, x: &Vector, t: &Vector, mutant: Mutant) -> Result<Gradients> {
        let trace = net.forward(x)?;
        let y = trace.output();
        check_dim(net.output_dim(), t.dim())?;

        let derivative = |l: usize, a: f64| -> Result<f64> {
            match mutant {
                Mutant::MissingDerivative => Ok(1.0),
                _ => net.activation_of(l).derivative_from_output(a),
            }
        };
        let sign = if mutant == Mutant::FlippedOutputSign { -1.0 } else { 1.0 };
        let depth = net.layer_sizes().len();

        let out = y
            .iter()
            .zip(t.iter())
            .map(|(&yk, &tk)| Ok(sign * (tk - yk) * derivative(depth - 1, yk)?))
            .collect::<Result<Vec<_>>>()?;
        let mut deltas = vec![Vector::new(out)?];

        for l in (1..depth - 1).rev() {
            let m = net.layer(l);
            let downstream = deltas.last().unwrap();
            let a = &trace.layers[l].activation;
            if mutant == Mutant::TransposedHiddenWeights {
                check_dim(a.dim(), m.cols())?;
            }
            let d = a
                .iter()
                .enumerate()
                .map(|(j, &aj)| {
                    let blame: f64 = downstream
                        .iter()
                        .enumerate()
                        .map(|(k, dk)| {
                            let w = match mutant {
                                Mutant::TransposedHiddenWeights => m.get(k, j),
                                _ => m.get(j, k),
                            };
                            w * dk
                        })
                        .sum();
                    Ok(derivative(l, aj)? * blame)
                })
                .collect::<Result<Vec<_>>>()?;
            deltas.push(Vector::new(d)?);
        }
        deltas.reverse();
        Ok(Gradients::from_deltas(&trace, &deltas))
    }
}
