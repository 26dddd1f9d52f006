//! Datasets, synthetic generators and CSV persistence.
//!
//! CSV layout: one sample per row, feature columns first and the last
//! `target_dim` columns as targets. Lines starting with `#` are ignored.
//! Values are written with the shortest representation that parses back to
//! the same `f64`, so a save/load round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::error::{check_dim, Error, Result};
use crate::math::Vector;
use crate::train::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vector,
    pub targets: Vector,
}

impl Sample {
    pub fn new(features: &[f64], targets: &[f64]) -> Result<Self> {
        Ok(Sample {
            features: Vector::try_from(features)?,
            targets: Vector::try_from(targets)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    feature_dim: usize,
    target_dim: usize,
}

impl Dataset {
    pub fn new(feature_dim: usize, target_dim: usize, samples: Vec<Sample>) -> Result<Self> {
        for s in &samples {
            check_dim(feature_dim, s.features.dim())?;
            check_dim(target_dim, s.targets.dim())?;
        }
        Ok(Dataset {
            samples,
            feature_dim,
            target_dim,
        })
    }

    /// Builds a dataset from `(features, targets)` rows, taking dimensions from
    /// the first row.
    pub fn from_rows(rows: &[(&[f64], &[f64])]) -> Result<Self> {
        let (f, t) = rows.first().ok_or(Error::EmptyData)?;
        let samples = rows
            .iter()
            .map(|(x, y)| Sample::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(f.len(), t.len(), samples)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyData)
        } else {
            Ok(())
        }
    }

    /// Seeded holdout split: returns `(train, holdout)` with
    /// `round(len * holdout_fraction)` samples held out.
    pub fn split(&self, holdout_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(0.0..=1.0).contains(&holdout_fraction) {
            return Err(Error::Parameter(format!(
                "holdout fraction must lie in [0, 1], got {holdout_fraction}"
            )));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut rng_from_seed(seed));
        let n_hold = (self.len() as f64 * holdout_fraction).round() as usize;
        let pick = |ids: &[usize]| Dataset {
            samples: ids.iter().map(|&i| self.samples[i].clone()).collect(),
            feature_dim: self.feature_dim,
            target_dim: self.target_dim,
        };
        Ok((pick(&idx[n_hold..]), pick(&idx[..n_hold])))
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            let mut first = true;
            for v in s.features.iter().chain(s.targets.iter()) {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicTask {
    And,
    Or,
    Xor,
}

impl FromStr for LogicTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(LogicTask::And),
            "or" => Ok(LogicTask::Or),
            "xor" => Ok(LogicTask::Xor),
            other => Err(Error::Parameter(format!("unknown logic task {other:?}"))),
        }
    }
}

/// The four-row truth table of a two-input logic gate.
pub fn gen_logic(task: LogicTask) -> Dataset {
    let gate = |a: bool, b: bool| match task {
        LogicTask::And => a && b,
        LogicTask::Or => a || b,
        LogicTask::Xor => a ^ b,
    };
    let samples = [(false, false), (false, true), (true, false), (true, true)]
        .into_iter()
        .map(|(a, b)| {
            let bit = |v: bool| if v { 1.0 } else { 0.0 };
            Sample::new(&[bit(a), bit(b)], &[bit(gate(a, b))]).expect("finite")
        })
        .collect();
    Dataset::new(2, 1, samples).expect("consistent dims")
}

/// A non-vertical line `x₂ = slope·x₁ + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    /// Perpendicular distance from `(x1, x2)`, positive above the line.
    pub fn signed_distance(&self, x1: f64, x2: f64) -> f64 {
        (x2 - self.slope * x1 - self.intercept) / (1.0 + self.slope * self.slope).sqrt()
    }

    pub fn is_above(&self, x1: f64, x2: f64) -> bool {
        x2 > self.slope * x1 + self.intercept
    }
}

const MAX_GENERATION_ATTEMPTS: usize = 1000;

/// `n` points drawn uniformly from `[-1, 1]²`, each at least `margin` away from
/// a random separating line, labelled 1 above the line and 0 below.
///
/// The line has slope in `[-1, 1]` and intercept in `[-0.5, 0.5]`. Lines that
/// leave one class empty, or whose admissible region cannot be hit within
/// the per-attempt budget, are redrawn up to 1000 times.
pub fn gen_separable_2d(n: usize, margin: f64, seed: u64) -> Result<(Dataset, Line)> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 points, got {n}")));
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::Parameter(format!("margin must be positive, got {margin}")));
    }
    let mut rng = rng_from_seed(seed);
    'attempt: for _ in 0..MAX_GENERATION_ATTEMPTS {
        let line = Line {
            slope: rng.random_range(-1.0..=1.0),
            intercept: rng.random_range(-0.5..=0.5),
        };
        let mut points = Vec::with_capacity(n);
        let mut budget = MAX_GENERATION_ATTEMPTS * n;
        while points.len() < n {
            if budget == 0 {
                continue 'attempt;
            }
            budget -= 1;
            let x1: f64 = rng.random_range(-1.0..=1.0);
            let x2: f64 = rng.random_range(-1.0..=1.0);
            if line.signed_distance(x1, x2).abs() >= margin {
                points.push((x1, x2));
            }
        }
        let ones = points.iter().filter(|(a, b)| line.is_above(*a, *b)).count();
        if ones == 0 || ones == n {
            continue;
        }
        let samples = points
            .into_iter()
            .map(|(a, b)| Sample::new(&[a, b], &[if line.is_above(a, b) { 1.0 } else { 0.0 }]))
            .collect::<Result<Vec<_>>>()?;
        return Ok((Dataset::new(2, 1, samples)?, line));
    }
    Err(Error::Generation {
        attempts: MAX_GENERATION_ATTEMPTS,
        reason: format!("no line admits {n} points with margin {margin} in both classes"),
    })
}

/// Adds seeded zero-mean Gaussian noise with standard deviation `sigma` to
/// every feature. Targets are left untouched.
pub fn add_noise(data: &Dataset, sigma: f64, seed: u64) -> Result<Dataset> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!(
            "noise sigma must be nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(data.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let samples = data
        .samples
        .iter()
        .map(|s| {
            let features = s
                .features
                .iter()
                .map(|v| v + normal.sample(&mut rng))
                .collect::<Vec<_>>();
            Ok(Sample {
                features: Vector::new(features)?,
                targets: s.targets.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(data.feature_dim, data.target_dim, samples)
}

/// Reads a dataset whose last `target_dim` columns are targets.
pub fn load_csv(path: impl AsRef<Path>, target_dim: usize) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_csv(&text, target_dim, path)
}

pub fn parse_csv(text: &str, target_dim: usize, path: &Path) -> Result<Dataset> {
    if target_dim == 0 {
        return Err(Error::Parameter("target dimension must be at least 1".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut width = None;
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                path: path.to_owned(),
                row,
                expected,
                found: record.len(),
            });
        }
        if expected <= target_dim {
            return Err(Error::Parameter(format!(
                "{}: {expected} columns cannot hold {target_dim} target column(s) plus features",
                path.display()
            )));
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::CellParse {
                        path: path.to_owned(),
                        row,
                        column: col + 1,
                        cell: cell.to_owned(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let split = values.len() - target_dim;
        samples.push(Sample::new(&values[..split], &values[split..])?);
    }
    let width = width.ok_or(Error::EmptyData)?;
    Dataset::new(width - target_dim, target_dim, samples)
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, data.to_csv_string())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(d: &Dataset) -> Vec<(Vec<f64>, Vec<f64>)> {
        d.iter()
            .map(|s| (s.features.as_slice().to_vec(), s.targets.as_slice().to_vec()))
            .collect()
    }

    #[test]
    fn truth_tables() {
        let t = |task| {
            rows(&gen_logic(task))
                .into_iter()
                .map(|(_, y)| y[0])
                .collect::<Vec<_>>()
        };
        assert_eq!(t(LogicTask::And), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(t(LogicTask::Or), vec![0.0, 1.0, 1.0, 1.0]);
        assert_eq!(t(LogicTask::Xor), vec![0.0, 1.0, 1.0, 0.0]);
        let x: Vec<_> = rows(&gen_logic(LogicTask::Xor)).into_iter().map(|(x, _)| x).collect();
        assert_eq!(x, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn separable_margin_and_labels() {
        for seed in 0..10 {
            let (data, line) = gen_separable_2d(50, 0.1, seed).unwrap();
            assert_eq!(data.len(), 50);
            let mut ones = 0;
            for s in data.iter() {
                let (a, b) = (s.features[0], s.features[1]);
                assert!(line.signed_distance(a, b).abs() >= 0.1);
                assert!((-1.0..=1.0).contains(&a) && (-1.0..=1.0).contains(&b));
                let label = s.targets[0];
                assert_eq!(label == 1.0, b > line.slope * a + line.intercept);
                ones += label as usize;
            }
            assert!(ones > 0 && ones < 50);
        }
    }

    #[test]
    fn separable_is_pure_in_seed() {
        assert_eq!(
            gen_separable_2d(20, 0.1, 7).unwrap(),
            gen_separable_2d(20, 0.1, 7).unwrap()
        );
        assert_ne!(
            gen_separable_2d(20, 0.1, 7).unwrap().0,
            gen_separable_2d(20, 0.1, 8).unwrap().0
        );
    }

    #[test]
    fn separable_rejects_impossible_margin() {
        assert!(matches!(gen_separable_2d(10, 2.0, 1), Err(Error::Generation { .. })));
        assert!(gen_separable_2d(1, 0.1, 1).is_err());
        assert!(gen_separable_2d(10, 0.0, 1).is_err());
    }

    #[test]
    fn noise_zero_is_identity_and_seeded() {
        let (data, _) = gen_separable_2d(30, 0.1, 3).unwrap();
        assert_eq!(add_noise(&data, 0.0, 9).unwrap(), data);
        let a = add_noise(&data, 0.05, 9).unwrap();
        let b = add_noise(&data, 0.05, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, data);
        for (n, o) in a.iter().zip(data.iter()) {
            assert_eq!(n.targets, o.targets);
        }
        assert!(add_noise(&data, -0.1, 9).is_err());
    }

    #[test]
    fn noise_mean_is_near_zero() {
        let sigma = 0.05;
        let samples = (0..5000).map(|_| Sample::new(&[0.0, 0.0], &[0.0]).unwrap()).collect();
        let zeros = Dataset::new(2, 1, samples).unwrap();
        let noisy = add_noise(&zeros, sigma, 11).unwrap();
        let values: Vec<f64> = noisy.iter().flat_map(|s| s.features.as_slice().to_vec()).collect();
        assert_eq!(values.len(), 10_000);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!(mean.abs() <= 3.0 * sigma / 100.0, "mean {mean}");
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        assert!((var.sqrt() - sigma).abs() < 0.1 * sigma);
    }

    #[test]
    fn csv_parses_fragment() {
        let d = parse_csv("0,0,0\n1,1,1\n", 1, Path::new("x.csv")).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.feature_dim(), 2);
        assert_eq!(rows(&d)[1], (vec![1.0, 1.0], vec![1.0]));
    }

    #[test]
    fn csv_skips_comment_lines() {
        let d = parse_csv("# x1,x2,y\n0.5, -1 ,1\n", 1, Path::new("x.csv")).unwrap();
        assert_eq!(rows(&d), vec![(vec![0.5, -1.0], vec![1.0])]);
    }

    #[test]
    fn csv_ragged_names_row() {
        let err = parse_csv("0,0,0\n1,1\n", 1, Path::new("r.csv")).unwrap_err();
        match err {
            Error::RaggedRow {
                row, expected, found, ..
            } => assert_eq!((row, expected, found), (2, 3, 2)),
            e => panic!("unexpected {e}"),
        }
        assert!(err_msg("0,0,0\n1,1\n").contains("row 2"));
    }

    fn err_msg(text: &str) -> String {
        parse_csv(text, 1, Path::new("r.csv")).unwrap_err().to_string()
    }

    #[test]
    fn csv_bad_cell_names_coordinates() {
        let err = parse_csv("# h\n0,0,0\n1,abc,1\n", 1, Path::new("b.csv")).unwrap_err();
        match err {
            Error::CellParse { row, column, cell, .. } => {
                assert_eq!((row, column, cell.as_str()), (3, 2, "abc"))
            }
            e => panic!("unexpected {e}"),
        }
        assert!(parse_csv("1,nan,1\n", 1, Path::new("b.csv")).is_err());
    }

    #[test]
    fn csv_needs_feature_columns() {
        assert!(parse_csv("1\n", 1, Path::new("x.csv")).is_err());
        assert!(parse_csv("1,2\n", 0, Path::new("x.csv")).is_err());
        assert!(matches!(
            parse_csv("# only\n", 1, Path::new("x.csv")),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn csv_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("xor.csv");
        let xor = gen_logic(LogicTask::Xor);
        save_csv(&xor, &path).unwrap();
        assert_eq!(load_csv(&path, 1).unwrap(), xor);
    }

    #[test]
    fn split_partitions() {
        let (data, _) = gen_separable_2d(20, 0.1, 1).unwrap();
        let (train, hold) = data.split(0.25, 4).unwrap();
        assert_eq!((train.len(), hold.len()), (15, 5));
        assert_eq!(data.split(0.25, 4).unwrap(), (train, hold));
    }
}
