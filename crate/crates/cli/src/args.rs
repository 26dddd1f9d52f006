use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ffnet",
    version,
    about = "Train and inspect small feedforward neural networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset CSV.
    Gen(GenArgs),
    /// Train a perceptron or multilayer network on a dataset.
    Train(TrainArgs),
    /// Report error and accuracy of a saved model on a dataset.
    Eval(EvalArgs),
    /// Compare backpropagation against finite differences on a random network.
    Gradcheck(GradcheckArgs),
    /// Grid search over learning rate, momentum and epoch cap.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    And,
    Or,
    Xor,
    /// Two linearly separable classes in [-1, 1]².
    Blobs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub task: Task,
    /// Output path [default: <task>.csv]
    pub out: Option<PathBuf>,
    /// Number of points (blobs only).
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Minimum distance from the separating line (blobs only).
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    /// Standard deviation of Gaussian feature noise.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, value_parser = parse_non_negative)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Perceptron,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThresholdUnit {
    Step,
    Signum,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    pub model: ModelKind,
    pub data: PathBuf,
    /// Layer sizes such as 2-2-1 (mlp only).
    #[arg(long, value_parser = parse_layers)]
    pub layers: Option<Layers>,
    #[arg(long, default_value_t = 0.1, value_parser = parse_learning_rate)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_momentum)]
    pub momentum: f64,
    #[arg(long, default_value_t = 1000)]
    pub epochs: usize,
    /// Stop once the epoch error reaches this value [default: 0 for perceptron, 0.05 for mlp]
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shuffle sample order every epoch.
    #[arg(long)]
    pub shuffle: bool,
    /// Number of trailing target columns in the CSV.
    #[arg(long, default_value_t = 1)]
    pub targets: usize,
    /// Perceptron output unit.
    #[arg(long, value_enum, default_value_t = ThresholdUnit::Step)]
    pub unit: ThresholdUnit,
    #[arg(long, default_value = "model.txt")]
    pub out_model: PathBuf,
    #[arg(long, default_value = "curve.csv")]
    pub out_curve: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub model: PathBuf,
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, value_parser = parse_layers)]
    pub layers: Layers,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Finite-difference step.
    #[arg(long, default_value_t = ffnet::gradcheck::DEFAULT_STEP, value_parser = parse_positive)]
    pub h: f64,
    #[arg(long, default_value_t = ffnet::gradcheck::DEFAULT_TOLERANCE, value_parser = parse_positive)]
    pub tol: f64,
    #[arg(long, default_value = "gradcheck.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub data: PathBuf,
    #[arg(long, value_parser = parse_layers)]
    pub layers: Layers,
    /// Comma-separated learning rates in (0, 1].
    #[arg(long, value_parser = parse_lr_list)]
    pub lr: LrList,
    /// Comma-separated momentum values in [0, 1).
    #[arg(long, value_parser = parse_momentum_list, default_value = "0")]
    pub momentum: MomentumList,
    /// Comma-separated epoch caps.
    #[arg(long, value_parser = parse_epoch_list, default_value = "10000")]
    pub epochs: EpochList,
    /// Training runs per grid cell.
    #[arg(long, default_value_t = 5)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub target: f64,
    /// Shuffle sample order every epoch.
    #[arg(long)]
    pub shuffle: bool,
    #[arg(long, default_value_t = 1)]
    pub targets: usize,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

// clap treats a bare `Vec<T>` field as a repeated flag; wrapping keeps each
// list a single comma-separated value.
#[derive(Debug, Clone)]
pub struct Layers(pub Vec<usize>);
#[derive(Debug, Clone)]
pub struct LrList(pub Vec<f64>);
#[derive(Debug, Clone)]
pub struct MomentumList(pub Vec<f64>);
#[derive(Debug, Clone)]
pub struct EpochList(pub Vec<usize>);

pub fn parse_layers(s: &str) -> Result<Layers, String> {
    let sizes = s
        .split('-')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad layer size {p:?} in {s:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if sizes.len() < 3 {
        return Err(format!("{s:?} needs input, hidden and output sizes, e.g. 2-2-1"));
    }
    if sizes.contains(&0) {
        return Err("layer sizes must be positive".into());
    }
    Ok(Layers(sizes))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{s:?} is not a number"))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn parse_non_negative(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must not be negative"))
    }
}

fn parse_learning_rate(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    ffnet::train::validate_learning_rate(v).map_err(|e| e.to_string())?;
    Ok(v)
}

fn parse_momentum(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    ffnet::train::validate_momentum(v).map_err(|e| e.to_string())?;
    Ok(v)
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items = s.split(',').map(item).collect::<Result<Vec<_>, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn parse_lr_list(s: &str) -> Result<LrList, String> {
    parse_list(s, parse_learning_rate).map(LrList)
}

fn parse_momentum_list(s: &str) -> Result<MomentumList, String> {
    parse_list(s, parse_momentum).map(MomentumList)
}

fn parse_epoch_list(s: &str) -> Result<EpochList, String> {
    parse_list(s, |p| match p.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("{p:?} is not a positive epoch count")),
    })
    .map(EpochList)
}
