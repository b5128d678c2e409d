//! Experiment harness for power-law suites.
//!
//! * `deficit`: realized versus target counts for the naive input.
//! * `heatmap`: model error and naive error over a `(N, beta)` grid.
//! * `overlay`: input, model prediction and realized mean per class.
//! * `shifted`: naive versus shifted inputs for targets `y_t = P x_t`.
//!
//! Each suite writes `<suite>.csv`, `<suite>.svg` and `config.json`; the two
//! grid suites also write `<suite>_counts.csv` with the raw per-class counts
//! every error was computed from.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{power_law_distribution, proportional_l1_error, DegreeDistribution};
use crate::error::{Error, Result};
use crate::exact_inverse::ExactInverse;
use crate::generator::{average_over_trials, Sampler};
use crate::plot::{self, HeatmapPanel, Marker, Panel, ScatterPanel, Series, PALETTE};
use crate::precision::{PrecisionContext, Real};
use crate::transfer_matrix::{build_transfer_matrix, predict_output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Deficit,
    Heatmap,
    Overlay,
    Shifted,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Deficit, Suite::Heatmap, Suite::Overlay, Suite::Shifted];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Deficit => "deficit",
            Suite::Heatmap => "heatmap",
            Suite::Overlay => "overlay",
            Suite::Shifted => "shifted",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

/// Fully resolved parameters of one suite run; written verbatim to `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub full: bool,
    pub n_values: Vec<f64>,
    pub beta_values: Vec<f64>,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub digits: u32,
    pub sampler: Sampler,
    pub out_dir: PathBuf,
}

/// `count` values spaced evenly in log10 between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64).round())
        .collect()
}

/// `1.0, 1.2, ..., 6.0`.
pub fn heatmap_betas() -> Vec<f64> {
    (0..=25).map(|i| (10 + 2 * i) as f64 / 10.0).collect()
}

/// `6 t / steps` for `t = 1..=steps`.
pub fn shifted_betas(steps: usize) -> Vec<f64> {
    (1..=steps).map(|t| 6.0 * t as f64 / steps as f64).collect()
}

impl ExperimentConfig {
    /// Desk-scale defaults, or the larger grids and trial counts with `full`.
    pub fn new(suite: Suite, full: bool, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        let (n_values, beta_values, m, trials) = match suite {
            Suite::Deficit | Suite::Overlay => (vec![1000.0], vec![1.0, 2.0], 40, 20),
            Suite::Heatmap if full => (log_grid(1e3, 1e5, 75), heatmap_betas(), 100, 20),
            Suite::Heatmap => (log_grid(1e3, 1e5, 5), heatmap_betas(), 40, 5),
            Suite::Shifted if full => (vec![1000.0], shifted_betas(100), 40, 30),
            Suite::Shifted => (vec![1000.0], shifted_betas(25), 40, 5),
        };
        Self {
            suite,
            full,
            n_values,
            beta_values,
            m,
            trials,
            seed,
            digits: PrecisionContext::for_dimension(m).digits(),
            sampler: Sampler::Skip,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.beta_values.is_empty() {
            return Err(Error::InvalidArgument("N and beta lists must be non-empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        Ok(())
    }
}

/// Seed for the `index`-th independent run of a suite.
fn cell_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitRow {
    pub beta: f64,
    pub degree: usize,
    pub target: f64,
    pub realized: f64,
    /// `realized / target`; empty when the target class is empty.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlayRow {
    pub beta: f64,
    pub degree: usize,
    pub input: f64,
    pub model: f64,
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub n: f64,
    pub beta: f64,
    pub t: Option<usize>,
    /// Model prediction versus realized.
    pub err_model: Option<f64>,
    /// Target versus realized from the naive input.
    pub err_naive: f64,
    /// Target versus realized from the shifted input.
    pub err_shifted: Option<f64>,
    /// `err_model / err_naive` (heatmap) or `err_shifted / err_naive` (shifted).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCountRow {
    pub n: f64,
    pub beta: f64,
    pub degree: usize,
    pub target: f64,
    pub model: f64,
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedCountRow {
    pub t: usize,
    pub beta: f64,
    pub degree: usize,
    pub target: f64,
    pub naive_input: f64,
    pub naive_realized: f64,
    pub shifted_input: f64,
    pub shifted_realized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SuiteTables {
    Deficit(Vec<DeficitRow>),
    Heatmap {
        records: Vec<ErrorRecord>,
        counts: Vec<HeatmapCountRow>,
    },
    Overlay(Vec<OverlayRow>),
    Shifted {
        records: Vec<ErrorRecord>,
        counts: Vec<ShiftedCountRow>,
    },
}

pub fn run(cfg: &ExperimentConfig) -> Result<SuiteTables> {
    cfg.validate()?;
    Ok(match cfg.suite {
        Suite::Deficit => SuiteTables::Deficit(run_deficit(cfg)?),
        Suite::Heatmap => {
            let (records, counts) = run_heatmap(cfg)?;
            SuiteTables::Heatmap { records, counts }
        }
        Suite::Overlay => SuiteTables::Overlay(run_overlay(cfg)?),
        Suite::Shifted => {
            let (records, counts) = run_shifted(cfg)?;
            SuiteTables::Shifted { records, counts }
        }
    })
}

pub fn run_deficit(cfg: &ExperimentConfig) -> Result<Vec<DeficitRow>> {
    let n = cfg.n_values[0];
    let per_beta: Vec<Vec<DeficitRow>> = cfg
        .beta_values
        .par_iter()
        .enumerate()
        .map(|(idx, &beta)| {
            let target = power_law_distribution(n, beta, cfg.m)?;
            let stats = average_over_trials(&target, cfg.trials, cfg.sampler, cell_seed(cfg.seed, idx))?;
            Ok(target
                .counts()
                .iter()
                .zip(&stats.mean_counts)
                .enumerate()
                .map(|(i, (&t, &r))| DeficitRow {
                    beta,
                    degree: i + 1,
                    target: t,
                    realized: r,
                    ratio: (t > 0.0).then(|| r / t),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_beta.into_iter().flatten().collect())
}

pub fn run_overlay(cfg: &ExperimentConfig) -> Result<Vec<OverlayRow>> {
    let n = cfg.n_values[0];
    let p = build_transfer_matrix(cfg.m)?;
    let per_beta: Vec<Vec<OverlayRow>> = cfg
        .beta_values
        .par_iter()
        .enumerate()
        .map(|(idx, &beta)| {
            let input = power_law_distribution(n, beta, cfg.m)?;
            let model = predict_output(&p, &input)?;
            let stats = average_over_trials(&input, cfg.trials, cfg.sampler, cell_seed(cfg.seed, idx))?;
            Ok((0..cfg.m)
                .map(|i| OverlayRow {
                    beta,
                    degree: i + 1,
                    input: input.counts()[i],
                    model: model[i],
                    realized: stats.mean_counts[i],
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_beta.into_iter().flatten().collect())
}

pub fn run_heatmap(cfg: &ExperimentConfig) -> Result<(Vec<ErrorRecord>, Vec<HeatmapCountRow>)> {
    let p = build_transfer_matrix(cfg.m)?;
    let cells: Vec<(f64, f64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| cfg.beta_values.iter().map(move |&b| (n, b)))
        .collect();
    let results: Vec<(ErrorRecord, Vec<HeatmapCountRow>)> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(n, beta))| {
            let target = power_law_distribution(n, beta, cfg.m)?;
            let model = predict_output(&p, &target)?;
            let stats = average_over_trials(&target, cfg.trials, cfg.sampler, cell_seed(cfg.seed, idx))?;
            let realized = &stats.mean_counts;
            let err_model = proportional_l1_error(&model, realized)?;
            let err_naive = proportional_l1_error(target.counts(), realized)?;
            let counts = (0..cfg.m)
                .map(|i| HeatmapCountRow {
                    n,
                    beta,
                    degree: i + 1,
                    target: target.counts()[i],
                    model: model[i],
                    realized: realized[i],
                })
                .collect();
            Ok((
                ErrorRecord {
                    n,
                    beta,
                    t: None,
                    err_model: Some(err_model),
                    err_naive,
                    err_shifted: None,
                    ratio: err_model / err_naive,
                },
                counts,
            ))
        })
        .collect::<Result<_>>()?;
    let (records, counts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok((records, counts.into_iter().flatten().collect()))
}

/// Targets `y_t = P x_t` for power-law `x_t` with the configured exponents,
/// realized once from `round(y_t)` and once from the shifted input `P^-1 y_t`.
pub fn run_shifted(cfg: &ExperimentConfig) -> Result<(Vec<ErrorRecord>, Vec<ShiftedCountRow>)> {
    let n = cfg.n_values[0];
    let inv = ExactInverse::new(cfg.m, PrecisionContext::new(cfg.digits)?)?;
    let results: Vec<(ErrorRecord, Vec<ShiftedCountRow>)> = cfg
        .beta_values
        .par_iter()
        .enumerate()
        .map(|(idx, &beta)| {
            let t = idx + 1;
            let x = power_law_distribution(n, beta, cfg.m)?;
            let x_real: Vec<Real> = x.counts().iter().map(|&c| Real::from_f64(c)).collect();
            let y = inv.forward(&x_real)?;
            let target: Vec<f64> = y.iter().map(Real::to_f64).collect();
            let shifted = inv.shift(&y)?.rounded_distribution()?;
            let naive = DegreeDistribution::new(target.clone())?.rounded();

            let naive_stats = average_over_trials(&naive, cfg.trials, cfg.sampler, cell_seed(cfg.seed, 2 * idx))?;
            let shifted_stats =
                average_over_trials(&shifted, cfg.trials, cfg.sampler, cell_seed(cfg.seed, 2 * idx + 1))?;
            let err_naive = proportional_l1_error(&target, &naive_stats.mean_counts)?;
            let err_shifted = proportional_l1_error(&target, &shifted_stats.mean_counts)?;
            let counts = (0..cfg.m)
                .map(|i| ShiftedCountRow {
                    t,
                    beta,
                    degree: i + 1,
                    target: target[i],
                    naive_input: naive.counts()[i],
                    naive_realized: naive_stats.mean_counts[i],
                    shifted_input: shifted.counts()[i],
                    shifted_realized: shifted_stats.mean_counts[i],
                })
                .collect();
            Ok((
                ErrorRecord {
                    n,
                    beta,
                    t: Some(t),
                    err_model: None,
                    err_naive,
                    err_shifted: Some(err_shifted),
                    ratio: err_shifted / err_naive,
                },
                counts,
            ))
        })
        .collect::<Result<_>>()?;
    let (records, counts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok((records, counts.into_iter().flatten().collect()))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the tables, the SVG and `config.json` into `cfg.out_dir`.
pub fn write_outputs(cfg: &ExperimentConfig, tables: &SuiteTables) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out_dir)?;
    let name = cfg.suite.name();
    let csv_path = cfg.out_dir.join(format!("{name}.csv"));
    let mut written = vec![csv_path.clone()];
    match tables {
        SuiteTables::Deficit(rows) => write_csv(&csv_path, rows)?,
        SuiteTables::Overlay(rows) => write_csv(&csv_path, rows)?,
        SuiteTables::Heatmap { records, counts } => {
            write_csv(&csv_path, records)?;
            let p = cfg.out_dir.join(format!("{name}_counts.csv"));
            write_csv(&p, counts)?;
            written.push(p);
        }
        SuiteTables::Shifted { records, counts } => {
            write_csv(&csv_path, records)?;
            let p = cfg.out_dir.join(format!("{name}_counts.csv"));
            write_csv(&p, counts)?;
            written.push(p);
        }
    }
    let svg_path = cfg.out_dir.join(format!("{name}.svg"));
    fs::write(&svg_path, render_svg(cfg, tables))?;
    written.push(svg_path);
    let config_path = cfg.out_dir.join("config.json");
    fs::write(&config_path, serde_json::to_string_pretty(cfg)? + "\n")?;
    written.push(config_path);
    Ok(written)
}

/// Runs the suite and writes its outputs.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<(SuiteTables, Vec<PathBuf>)> {
    let tables = run(cfg)?;
    let paths = write_outputs(cfg, &tables)?;
    Ok((tables, paths))
}

fn series(name: &str, color: &'static str, marker: Marker, points: Vec<(f64, f64)>) -> Series {
    Series {
        name: name.into(),
        color,
        marker,
        points,
    }
}

fn class_panels(beta: f64, max_class: usize, log_y: bool, all: Vec<Series>) -> Panel {
    Panel::Scatter(ScatterPanel {
        title: format!("beta = {beta}, classes 1..{max_class}"),
        x_label: "degree".into(),
        y_label: "nodes".into(),
        log_y,
        series: all
            .into_iter()
            .map(|mut s| {
                s.points.retain(|(x, _)| *x <= max_class as f64);
                s
            })
            .collect(),
    })
}

pub fn render_svg(cfg: &ExperimentConfig, tables: &SuiteTables) -> String {
    match tables {
        SuiteTables::Deficit(rows) => {
            let mut panels = Vec::new();
            for &beta in &cfg.beta_values {
                let sel: Vec<&DeficitRow> = rows.iter().filter(|r| r.beta == beta).collect();
                let all = vec![
                    series("target", PALETTE[3], Marker::Cross, sel.iter().map(|r| (r.degree as f64, r.target)).collect()),
                    series("realized", PALETTE[0], Marker::Circle, sel.iter().map(|r| (r.degree as f64, r.realized)).collect()),
                ];
                panels.push(class_panels(beta, 9, false, all.clone()));
                panels.push(class_panels(beta, cfg.m, true, all));
            }
            plot::render(&panels, 2)
        }
        SuiteTables::Overlay(rows) => {
            let mut panels = Vec::new();
            for &beta in &cfg.beta_values {
                let sel: Vec<&OverlayRow> = rows.iter().filter(|r| r.beta == beta).collect();
                let all = vec![
                    series("input", PALETTE[3], Marker::Cross, sel.iter().map(|r| (r.degree as f64, r.input)).collect()),
                    series("model", PALETTE[1], Marker::Circle, sel.iter().map(|r| (r.degree as f64, r.model)).collect()),
                    series("realized", PALETTE[0], Marker::Cross, sel.iter().map(|r| (r.degree as f64, r.realized)).collect()),
                ];
                panels.push(class_panels(beta, 9, false, all.clone()));
                panels.push(class_panels(beta, cfg.m, true, all));
            }
            plot::render(&panels, 2)
        }
        SuiteTables::Heatmap { records, .. } => {
            let grid = |f: &dyn Fn(&ErrorRecord) -> f64| -> Vec<Vec<f64>> {
                cfg.n_values
                    .iter()
                    .map(|&n| {
                        cfg.beta_values
                            .iter()
                            .map(|&b| {
                                records
                                    .iter()
                                    .find(|r| r.n == n && r.beta == b)
                                    .map_or(f64::NAN, f)
                            })
                            .collect()
                    })
                    .collect()
            };
            let panel = |title: &str, values| {
                Panel::Heatmap(HeatmapPanel {
                    title: title.into(),
                    x_label: "beta".into(),
                    y_label: "N".into(),
                    x_values: cfg.beta_values.clone(),
                    y_values: cfg.n_values.clone(),
                    values,
                })
            };
            plot::render(
                &[
                    panel("model vs realized (proportional L1)", grid(&|r| r.err_model.unwrap_or(f64::NAN))),
                    panel("input vs realized (proportional L1)", grid(&|r| r.err_naive)),
                    panel("ratio model / naive", grid(&|r| r.ratio)),
                ],
                1,
            )
        }
        SuiteTables::Shifted { records, .. } => {
            let naive = records.iter().map(|r| (r.t.unwrap_or(0) as f64, r.err_naive)).collect();
            let shifted = records
                .iter()
                .map(|r| (r.t.unwrap_or(0) as f64, r.err_shifted.unwrap_or(f64::NAN)))
                .collect();
            plot::render(
                &[Panel::Scatter(ScatterPanel {
                    title: "naive vs shifted input".into(),
                    x_label: "t".into(),
                    y_label: "proportional L1 error".into(),
                    log_y: false,
                    series: vec![
                        series("naive", PALETTE[0], Marker::Line, naive),
                        series("shifted", PALETTE[1], Marker::DashedLine, shifted),
                    ],
                })],
                1,
            )
        }
    }
}
