//! Plain-text model files.
//!
//! Multilayer network:
//!
//! ```text
//! mlpmodel v1
//! 2 2 1
//! sigmoid 1
//! <one line per weight-matrix row>
//! <bias weights of that layer>
//! ...
//! ```
//!
//! Perceptron:
//!
//! ```text
//! perceptron v1
//! 2
//! step 1 0
//! <feature weights>
//! <bias weight>
//! ```
//!
//! Numbers use the shortest decimal form that parses back to the same
//! `f64`, so loading a saved model reproduces it exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::math::{Activation, ActivationKind, Vector};
use crate::mlp::{Matrix, MlpNetwork};
use crate::perceptron::Perceptron;

pub const MLP_HEADER: &str = "mlpmodel v1";
pub const PERCEPTRON_HEADER: &str = "perceptron v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Perceptron(Perceptron),
    Mlp(MlpNetwork),
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    let mut out = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out
}

pub fn mlp_to_string(net: &MlpNetwork) -> Result<String> {
    let (h, o) = (net.hidden_activation(), net.output_activation());
    if h != o {
        return Err(Error::Parameter(
            "the model format stores a single activation for all layers".into(),
        ));
    }
    let mut out = String::new();
    writeln!(out, "{MLP_HEADER}").unwrap();
    let sizes: Vec<String> = net.layer_sizes().iter().map(usize::to_string).collect();
    writeln!(out, "{}", sizes.join(" ")).unwrap();
    writeln!(out, "{} {}", h.kind(), h.steepness()).unwrap();
    for m in net.layers() {
        for r in 0..m.rows() {
            writeln!(out, "{}", join(m.row(r).iter().copied())).unwrap();
        }
    }
    Ok(out)
}

pub fn perceptron_to_string(p: &Perceptron) -> String {
    let a = p.activation();
    format!(
        "{PERCEPTRON_HEADER}\n{}\n{} {} {}\n{}\n{}\n",
        p.dim(),
        a.kind(),
        a.steepness(),
        a.threshold(),
        join(p.weights().iter().copied()),
        p.bias_weight()
    )
}

impl Model {
    pub fn to_text(&self) -> Result<String> {
        match self {
            Model::Perceptron(p) => Ok(perceptron_to_string(p)),
            Model::Mlp(n) => mlp_to_string(n),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        Model::parse(&fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Model> {
        let mut lines = Lines::new(text);
        match lines.next()? {
            MLP_HEADER => parse_mlp(&mut lines).map(Model::Mlp),
            PERCEPTRON_HEADER => parse_perceptron(&mut lines).map(Model::Perceptron),
            other => Err(lines.error(format!("unknown model header {other:?}"))),
        }
    }
}

struct Lines<'a> {
    inner: std::str::Lines<'a>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines(),
            line: 0,
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        self.line += 1;
        self.inner
            .next()
            .map(str::trim)
            .ok_or_else(|| self.error("unexpected end of file".into()))
    }

    fn error(&self, message: String) -> Error {
        Error::ModelFormat {
            line: self.line,
            message,
        }
    }

    fn numbers(&mut self, expected: usize) -> Result<Vec<f64>> {
        let line = self.next()?;
        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.error(format!("bad number {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != expected {
            return Err(self.error(format!("expected {expected} values, found {}", values.len())));
        }
        Ok(values)
    }

    fn activation(&mut self, with_threshold: bool) -> Result<Activation> {
        let line = self.next()?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let want = if with_threshold { 3 } else { 2 };
        if toks.len() != want {
            return Err(self.error(format!("expected {want} activation fields, found {}", toks.len())));
        }
        let kind: ActivationKind = toks[0].parse().map_err(|e: Error| self.error(e.to_string()))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| self.error(format!("bad number {s:?}")));
        let steepness = num(toks[1])?;
        let threshold = if with_threshold { num(toks[2])? } else { 0.0 };
        Activation::new(kind, steepness, threshold).map_err(|e| self.error(e.to_string()))
    }

    fn finish(&mut self) -> Result<()> {
        for rest in self.inner.by_ref() {
            self.line += 1;
            if !rest.trim().is_empty() {
                return Err(self.error("trailing content".into()));
            }
        }
        Ok(())
    }
}

fn parse_mlp(lines: &mut Lines<'_>) -> Result<MlpNetwork> {
    let sizes = lines
        .next()?
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| lines.error(format!("bad layer size: {e}")))?;
    if sizes.len() < 3 || sizes.contains(&0) {
        return Err(lines.error(format!("invalid layer sizes {sizes:?}")));
    }
    let act = lines.activation(false)?;
    if !act.is_differentiable() {
        return Err(lines.error(format!("{} activation is not differentiable", act.kind())));
    }
    let mut layers = Vec::with_capacity(sizes.len() - 1);
    for w in sizes.windows(2) {
        let rows = (0..=w[0]).map(|_| lines.numbers(w[1])).collect::<Result<Vec<_>>>()?;
        layers.push(Matrix::from_rows(&rows)?);
    }
    lines.finish()?;
    MlpNetwork::from_layers(&sizes, layers, act, act)
}

fn parse_perceptron(lines: &mut Lines<'_>) -> Result<Perceptron> {
    let dim_line = lines.next()?;
    let dim: usize = dim_line
        .parse()
        .map_err(|_| lines.error(format!("bad dimension {dim_line:?}")))?;
    let act = lines.activation(true)?;
    let weights = lines.numbers(dim)?;
    let bias = lines.numbers(1)?[0];
    lines.finish()?;
    Perceptron::new(Vector::new(weights)?, bias, act)
}
