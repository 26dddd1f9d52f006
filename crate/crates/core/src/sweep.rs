//! Grid search over learning rate, momentum and epoch cap.
//!
//! Every grid cell is trained `seeds_per_cell` times with seeds derived from
//! `(base_seed, cell, replicate)`, so a cell's outcome does not depend on
//! which other cells run or in what order. Cells are ranked by the key
//! `(reached target ? 0 : 1, median epochs to target, median final error)`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::mlp::{check_data_shape, train_mlp};
use crate::train::{validate_learning_rate, validate_momentum, TrainConfig};

pub const RANKING_RULE: &str = "(converged ? 0 : 1, median_epochs_to_target, median_final_sse) ascending";

/// A curve oscillates when it rises and then falls by more than this share
/// of its range...
pub const OSCILLATION_SWING_FRACTION: f64 = 0.1;
/// ...more than this many times.
pub const OSCILLATION_MAX_SWINGS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub learning_rates: Vec<f64>,
    pub momenta: Vec<f64>,
    pub epoch_caps: Vec<usize>,
    pub seeds_per_cell: usize,
    pub base_seed: u64,
    /// Passed through to every training run.
    pub shuffle_each_epoch: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epoch_cap: usize,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| Error::Parameter(format!("sweep grid has no {name}"));
        if self.learning_rates.is_empty() {
            return Err(empty("learning rates"));
        }
        if self.momenta.is_empty() {
            return Err(empty("momentum values"));
        }
        if self.epoch_caps.is_empty() {
            return Err(empty("epoch caps"));
        }
        if self.seeds_per_cell == 0 {
            return Err(Error::Parameter("seeds per cell must be positive".into()));
        }
        for &lr in &self.learning_rates {
            validate_learning_rate(lr)?;
        }
        for &m in &self.momenta {
            validate_momentum(m)?;
        }
        if self.epoch_caps.contains(&0) {
            return Err(Error::Parameter("epoch caps must be positive".into()));
        }
        Ok(())
    }

    /// Cells in row-major order: learning rate, then momentum, then epoch cap.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &learning_rate in &self.learning_rates {
            for &momentum in &self.momenta {
                for &epoch_cap in &self.epoch_caps {
                    cells.push(Cell {
                        index: cells.len(),
                        learning_rate,
                        momentum,
                        epoch_cap,
                    });
                }
            }
        }
        cells
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one training run inside a sweep.
pub fn derive_seed(base_seed: u64, cell: usize, replicate: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ cell as u64) ^ replicate as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub seed: u64,
    pub final_sse: f64,
    pub epochs_to_target: Option<usize>,
    pub oscillation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub cell: Cell,
    pub median_final_sse: f64,
    /// `None` when the median replicate never reached the target.
    pub median_epochs_to_target: Option<usize>,
    /// Set when any replicate's error curve oscillated.
    pub oscillation: bool,
    pub replicates: Vec<Replicate>,
}

impl CellRecord {
    pub fn converged(&self) -> bool {
        self.median_epochs_to_target.is_some()
    }

    pub fn rank_key(&self) -> (u8, usize, f64) {
        (
            if self.converged() { 0 } else { 1 },
            self.median_epochs_to_target.unwrap_or(usize::MAX),
            self.median_final_sse,
        )
    }
}

fn compare_keys(a: &(u8, usize, f64), b: &(u8, usize, f64)) -> std::cmp::Ordering {
    a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One record per cell, in cell order.
    pub records: Vec<CellRecord>,
    /// Cell indices best-first.
    pub ranking: Vec<usize>,
    pub best_cell: usize,
    pub ranking_rule: &'static str,
    pub target_error: f64,
}

impl SweepResult {
    pub fn best(&self) -> &CellRecord {
        &self.records[self.best_cell]
    }

    pub fn ranked(&self) -> impl Iterator<Item = &CellRecord> {
        self.ranking.iter().map(|&i| &self.records[i])
    }
}

/// Median of values where `None` counts as larger than any epoch count.
/// For an even count the upper of the two middle values is taken.
pub fn median_epochs(values: &[Option<usize>]) -> Option<usize> {
    let mut sorted: Vec<usize> = values.iter().map(|v| v.unwrap_or(usize::MAX)).collect();
    sorted.sort_unstable();
    let m = *sorted.get(sorted.len() / 2)?;
    (m != usize::MAX).then_some(m)
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Number of rise-then-fall swings larger than `threshold`, found by a
/// zigzag scan that ignores moves smaller than the threshold.
pub fn count_swings(curve: &[f64], threshold: f64) -> usize {
    #[derive(PartialEq)]
    enum Dir {
        Unknown,
        Up,
        Down,
    }
    let Some(&first) = curve.first() else {
        return 0;
    };
    let (mut dir, mut extreme) = (Dir::Unknown, first);
    let (mut lo, mut hi) = (first, first);
    let mut peaks = 0;
    for &v in &curve[1..] {
        match dir {
            Dir::Unknown => {
                lo = lo.min(v);
                hi = hi.max(v);
                if v - lo > threshold {
                    dir = Dir::Up;
                    extreme = v;
                } else if hi - v > threshold {
                    dir = Dir::Down;
                    extreme = v;
                }
            }
            Dir::Up => {
                if v > extreme {
                    extreme = v;
                } else if extreme - v > threshold {
                    peaks += 1;
                    dir = Dir::Down;
                    extreme = v;
                }
            }
            Dir::Down => {
                if v < extreme {
                    extreme = v;
                } else if v - extreme > threshold {
                    dir = Dir::Up;
                    extreme = v;
                }
            }
        }
    }
    peaks
}

/// More than five rise-then-fall swings each exceeding 10% of the curve's
/// range.
pub fn is_oscillating(curve: &[f64]) -> bool {
    let (lo, hi) = curve.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let range = hi - lo;
    if range.is_nan() || range <= 0.0 {
        return false;
    }
    count_swings(curve, OSCILLATION_SWING_FRACTION * range) > OSCILLATION_MAX_SWINGS
}

/// Trains every replicate of one cell and aggregates them.
pub fn evaluate_cell(
    data: &Dataset,
    layer_sizes: &[usize],
    grid: &SweepGrid,
    cell: Cell,
    target_error: f64,
) -> Result<CellRecord> {
    let replicates = (0..grid.seeds_per_cell)
        .map(|r| {
            let seed = derive_seed(grid.base_seed, cell.index, r);
            let cfg = TrainConfig {
                learning_rate: cell.learning_rate,
                momentum: cell.momentum,
                max_epochs: cell.epoch_cap,
                target_error,
                seed,
                shuffle_each_epoch: grid.shuffle_each_epoch,
            };
            let (_, report) = train_mlp(data, layer_sizes, &cfg)?;
            let curve: Vec<f64> = report.error_curve.iter().map(|e| e.sse).collect();
            Ok(Replicate {
                seed,
                final_sse: report.final_sse().unwrap_or(f64::NAN),
                epochs_to_target: report.epochs_to_target(),
                oscillation: is_oscillating(&curve),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sses: Vec<f64> = replicates.iter().map(|r| r.final_sse).collect();
    let epochs: Vec<Option<usize>> = replicates.iter().map(|r| r.epochs_to_target).collect();
    Ok(CellRecord {
        cell,
        median_final_sse: median(&sses),
        median_epochs_to_target: median_epochs(&epochs),
        oscillation: replicates.iter().any(|r| r.oscillation),
        replicates,
    })
}

/// Ranks already evaluated cell records (given in cell order).
pub fn rank(records: Vec<CellRecord>, target_error: f64) -> SweepResult {
    let mut ranking: Vec<usize> = (0..records.len()).collect();
    ranking.sort_by(|&a, &b| compare_keys(&records[a].rank_key(), &records[b].rank_key()).then(a.cmp(&b)));
    SweepResult {
        best_cell: ranking[0],
        ranking,
        records,
        ranking_rule: RANKING_RULE,
        target_error,
    }
}

/// Trains one network per (cell, replicate) in parallel and ranks the cells.
pub fn run_sweep(data: &Dataset, layer_sizes: &[usize], grid: &SweepGrid, target_error: f64) -> Result<SweepResult> {
    grid.validate()?;
    data.ensure_nonempty()?;
    check_data_shape(data, layer_sizes)?;
    let records = grid
        .cells()
        .into_par_iter()
        .map(|cell| evaluate_cell(data, layer_sizes, grid, cell, target_error))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank(records, target_error))
}

fn epochs_cell(e: Option<usize>) -> String {
    e.map_or_else(|| "inf".to_string(), |n| n.to_string())
}

pub const CSV_HEADER: &str = "# lr,momentum,epochs,median_sse,median_epochs,oscillation";

/// Column-aligned table plus its CSV twin, both best-first.
pub fn report_table(result: &SweepResult) -> (String, String) {
    let header = [
        "rank",
        "lr",
        "momentum",
        "epochs",
        "median_sse",
        "median_epochs",
        "oscillation",
    ];
    let rows: Vec<[String; 7]> = result
        .ranked()
        .enumerate()
        .map(|(i, r)| {
            [
                (i + 1).to_string(),
                r.cell.learning_rate.to_string(),
                r.cell.momentum.to_string(),
                r.cell.epoch_cap.to_string(),
                format!("{:.6e}", r.median_final_sse),
                epochs_cell(r.median_epochs_to_target),
                if r.oscillation { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut table = String::new();
    let mut line = |cells: &[&str]| {
        let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:>w$}")).collect();
        writeln!(table, "{}", padded.join("  ").trim_end()).unwrap();
    };
    line(&header);
    for row in &rows {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }

    let mut csv = format!("{CSV_HEADER}\n");
    for r in result.ranked() {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.cell.learning_rate,
            r.cell.momentum,
            r.cell.epoch_cap,
            r.median_final_sse,
            epochs_cell(r.median_epochs_to_target),
            u8::from(r.oscillation)
        )
        .unwrap();
    }
    (table, csv)
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epoch_cap: usize,
    pub median_sse: f64,
    pub median_epochs: Option<usize>,
    pub oscillation: bool,
}

impl From<&CellRecord> for SweepRow {
    fn from(r: &CellRecord) -> Self {
        SweepRow {
            learning_rate: r.cell.learning_rate,
            momentum: r.cell.momentum,
            epoch_cap: r.cell.epoch_cap,
            median_sse: r.median_final_sse,
            median_epochs: r.median_epochs_to_target,
            oscillation: r.oscillation,
        }
    }
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let bad = |line: usize, msg: String| Error::Parameter(format!("sweep csv line {line}: {msg}"));
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(i + 1, format!("expected 6 columns, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1, format!("bad number {s:?}")));
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad(i + 1, format!("bad integer {s:?}")));
        rows.push(SweepRow {
            learning_rate: num(f[0])?,
            momentum: num(f[1])?,
            epoch_cap: int(f[2])?,
            median_sse: num(f[3])?,
            median_epochs: if f[4] == "inf" { None } else { Some(int(f[4])?) },
            oscillation: match f[5] {
                "0" => false,
                "1" => true,
                other => return Err(bad(i + 1, format!("bad flag {other:?}"))),
            },
        });
    }
    Ok(rows)
}
