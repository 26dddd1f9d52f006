use std::fs;
use std::path::{Path, PathBuf};

use ffnet::data::{add_noise, gen_logic, gen_separable_2d, load_csv, save_csv, Dataset};
use ffnet::gradcheck;
use ffnet::mlp::check_data_shape;
use ffnet::sweep::{report_table, run_sweep, SweepGrid};
use ffnet::train::rng_from_seed;
use ffnet::{train_mlp, train_perceptron, Activation, LogicTask, MlpNetwork, Model, TrainConfig, TrainReport, Vector};
use rand::Rng as _;
use thiserror::Error;

use crate::args::{Command, EvalArgs, GenArgs, GradcheckArgs, ModelKind, SweepArgs, Task, ThresholdUnit, TrainArgs};
use crate::manifest::RunManifest;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] ffnet::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Core(_) => EXIT_CHECK_FAILED,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_manifest(m: &RunManifest, out: &Path) -> Result<PathBuf> {
    m.write_beside(out).map_err(|source| CliError::Io {
        path: RunManifest::path_for(out),
        source,
    })
}

fn layers_str(sizes: &[usize]) -> String {
    sizes.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Runs a command and returns the process exit status.
pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Gradcheck(a) => grad_check(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn task_name(task: Task) -> &'static str {
    match task {
        Task::And => "and",
        Task::Or => "or",
        Task::Xor => "xor",
        Task::Blobs => "blobs",
    }
}

fn gen(a: GenArgs) -> Result<u8> {
    let name = task_name(a.task);
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let mut manifest = RunManifest::new("gen");
    manifest.param("task", name);

    let data = match a.task {
        Task::And => gen_logic(LogicTask::And),
        Task::Or => gen_logic(LogicTask::Or),
        Task::Xor => gen_logic(LogicTask::Xor),
        Task::Blobs => {
            let (data, line) = gen_separable_2d(a.n, a.margin, a.seed)?;
            manifest
                .param("n", a.n)
                .param("margin", a.margin)
                .metric("line_slope", line.slope)
                .metric("line_intercept", line.intercept);
            data
        }
    };
    let data = add_noise(&data, a.noise, a.seed)?;
    manifest.param("noise", a.noise).param("seed", a.seed);

    save_csv(&data, &out).map_err(|e| match e {
        ffnet::Error::Io(source) => CliError::Io {
            path: out.clone(),
            source,
        },
        e => e.into(),
    })?;
    manifest.artifact(&out).metric("rows", data.len());
    write_manifest(&manifest, &out)?;
    println!("rows={}", data.len());
    Ok(EXIT_OK)
}

fn load(path: &Path, target_dim: usize) -> Result<Dataset> {
    load_csv(path, target_dim).map_err(|e| match e {
        ffnet::Error::Io(source) => CliError::Io {
            path: path.to_owned(),
            source,
        },
        e => e.into(),
    })
}

fn print_summary(report: &TrainReport) {
    println!("converged={}", report.converged);
    println!(
        "final_sse={}",
        report.final_sse().map_or("none".into(), |v| v.to_string())
    );
    println!("epochs={}", report.final_epoch);
}

fn train(a: TrainArgs) -> Result<u8> {
    let data = load(&a.data, a.targets)?;
    let target = a.target.unwrap_or(match a.model {
        ModelKind::Perceptron => 0.0,
        ModelKind::Mlp => 0.05,
    });
    let cfg = TrainConfig {
        learning_rate: a.lr,
        max_epochs: a.epochs,
        target_error: target,
        seed: a.seed,
        shuffle_each_epoch: a.shuffle,
        momentum: a.momentum,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let mut manifest = RunManifest::new("train");
    manifest
        .param("model", format!("{:?}", a.model).to_lowercase())
        .param("data", a.data.display())
        .param("targets", a.targets);

    let (model, report, accuracy) = match a.model {
        ModelKind::Perceptron => {
            let unit = match a.unit {
                ThresholdUnit::Step => Activation::step(0.0),
                ThresholdUnit::Signum => Activation::signum(0.0),
            };
            if data.target_dim() != 1 {
                return Err(CliError::Config(format!(
                    "a perceptron has one output, the data has {} target columns",
                    data.target_dim()
                )));
            }
            let (p, report) = train_perceptron(&data, &cfg, unit).map_err(config_error)?;
            manifest.param("unit", unit.kind());
            let acc = p.accuracy(&data)?;
            (Model::Perceptron(p), report, acc)
        }
        ModelKind::Mlp => {
            let layers = a
                .layers
                .clone()
                .map(|l| l.0)
                .ok_or_else(|| CliError::Usage("train mlp requires --layers, e.g. --layers 2-2-1".into()))?;
            check_data_shape(&data, &layers).map_err(|e| {
                CliError::Config(format!(
                    "layers {} do not fit data with {} feature(s) and {} target(s): {e}",
                    layers_str(&layers),
                    data.feature_dim(),
                    data.target_dim()
                ))
            })?;
            manifest.param("layers", layers_str(&layers));
            let (net, report) = train_mlp(&data, &layers, &cfg).map_err(config_error)?;
            let acc = net.accuracy(&data)?;
            (Model::Mlp(net), report, acc)
        }
    };

    write_file(&a.out_model, &model.to_text()?)?;
    write_file(&a.out_curve, &report.curve_csv())?;

    manifest
        .param("lr", a.lr)
        .param("momentum", a.momentum)
        .param("epochs", a.epochs)
        .param("target", target)
        .param("seed", a.seed)
        .param("shuffle", a.shuffle)
        .artifact(&a.out_model)
        .artifact(&a.out_curve)
        .metric("converged", report.converged)
        .metric("final_sse", report.final_sse().map_or("none".into(), |v| v.to_string()))
        .metric("epochs_used", report.final_epoch)
        .metric("accuracy", accuracy);
    write_manifest(&manifest, &a.out_model)?;

    print_summary(&report);
    println!("accuracy={accuracy}");
    Ok(if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn config_error(e: ffnet::Error) -> CliError {
    match e {
        ffnet::Error::LabelDomain { .. } | ffnet::Error::Dimension { .. } | ffnet::Error::EmptyData => {
            CliError::Config(e.to_string())
        }
        e => e.into(),
    }
}

fn eval(a: EvalArgs) -> Result<u8> {
    let model = Model::load(&a.model).map_err(|e| match e {
        ffnet::Error::Io(source) => CliError::Io {
            path: a.model.clone(),
            source,
        },
        e => e.into(),
    })?;
    let (inputs, outputs) = match &model {
        Model::Perceptron(p) => (p.dim(), 1),
        Model::Mlp(n) => (n.input_dim(), n.output_dim()),
    };
    let data = load(&a.data, outputs)?;
    if data.feature_dim() != inputs {
        return Err(CliError::Config(format!(
            "model expects {inputs} feature(s), data has {}",
            data.feature_dim()
        )));
    }
    let (sse, accuracy) = match &model {
        Model::Perceptron(p) => (p.sse(&data)?, p.accuracy(&data)?),
        Model::Mlp(n) => (n.loss(&data)?, n.accuracy(&data)?),
    };
    println!("sse={sse}");
    println!("accuracy={accuracy}");
    println!("samples={}", data.len());
    Ok(EXIT_OK)
}

/// Seeded network with weights in `[-1, 1]`, input in `[-1, 1]` and target in
/// `[0, 1]`.
pub fn gradcheck_case(layers: &[usize], seed: u64) -> ffnet::Result<(MlpNetwork, Vector, Vector)> {
    let mut rng = rng_from_seed(seed);
    let net = MlpNetwork::random_in(layers, 1.0, &mut rng)?;
    let x = Vector::new((0..layers[0]).map(|_| rng.random_range(-1.0..=1.0)).collect())?;
    let t = Vector::new(
        (0..*layers.last().unwrap())
            .map(|_| rng.random_range(0.0..=1.0))
            .collect(),
    )?;
    Ok((net, x, t))
}

fn grad_check(a: GradcheckArgs) -> Result<u8> {
    let (net, x, t) = gradcheck_case(&a.layers.0, a.seed)?;
    let report = gradcheck::check(&net, &x, &t, a.h, a.tol)?;
    write_file(&a.out, &report.to_csv())?;

    let mut manifest = RunManifest::new("gradcheck");
    manifest
        .param("layers", layers_str(&a.layers.0))
        .param("seed", a.seed)
        .param("h", a.h)
        .param("tol", a.tol)
        .artifact(&a.out)
        .metric("parameters", report.records.len())
        .metric("max_rel_error", report.max_rel_error)
        .metric("pass", report.pass);
    write_manifest(&manifest, &a.out)?;

    println!("parameters={}", report.records.len());
    println!("max_rel_error={}", report.max_rel_error);
    println!("pass={}", report.pass);
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn sweep(a: SweepArgs) -> Result<u8> {
    let data = load(&a.data, a.targets)?;
    check_data_shape(&data, &a.layers.0).map_err(|e| CliError::Config(e.to_string()))?;
    let grid = SweepGrid {
        learning_rates: a.lr.0.clone(),
        momenta: a.momentum.0.clone(),
        epoch_caps: a.epochs.0.clone(),
        seeds_per_cell: a.replicates,
        base_seed: a.seed,
        shuffle_each_epoch: a.shuffle,
    };
    grid.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let result = run_sweep(&data, &a.layers.0, &grid, a.target).map_err(config_error)?;
    let (table, csv) = report_table(&result);
    write_file(&a.out, &csv)?;

    let best = result.best();
    let mut manifest = RunManifest::new("sweep");
    manifest
        .param("data", a.data.display())
        .param("layers", layers_str(&a.layers.0))
        .param("lr", join(&grid.learning_rates))
        .param("momentum", join(&grid.momenta))
        .param("epochs", join(&grid.epoch_caps))
        .param("replicates", a.replicates)
        .param("seed", a.seed)
        .param("target", a.target)
        .param("shuffle", a.shuffle)
        .artifact(&a.out)
        .metric("ranking_rule", result.ranking_rule)
        .metric("best_lr", best.cell.learning_rate)
        .metric("best_momentum", best.cell.momentum)
        .metric("best_epochs", best.cell.epoch_cap);
    write_manifest(&manifest, &a.out)?;

    print!("{table}");
    Ok(EXIT_OK)
}
