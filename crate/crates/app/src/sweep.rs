//! Parameter sweeps over the closed-form model and their CSV serialization.

use std::io::Write;
use std::path::Path;

use echomem::numerics::SpectralFunction;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Parameter, SweepAxis};
use crate::error::{AppError, Result};
use crate::metrics::{distortion_ratio_center, peak_ratio, ratio_rows, total_probability, Experiment};

pub const METRIC_COLUMNS: [&str; 3] = ["total_probability", "peak_ratio", "distortion_ratio_center"];

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    /// A metric came out NaN or infinite.
    NonFinite,
    /// The point could not be evaluated.
    Failed(String),
}

impl RowStatus {
    pub fn label(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::NonFinite => "non-finite".into(),
            RowStatus::Failed(msg) => format!("error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// One value per axis, in declaration order.
    pub coords: Vec<f64>,
    pub total_probability: f64,
    pub peak_ratio: f64,
    pub distortion_ratio_center: f64,
    /// Normalized spectral ratio, present when a `detuning_per_s` axis is swept.
    pub ratio: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    pub rows: Vec<SweepRow>,
    /// Echo spectra per model point (axes other than detuning), when kept.
    pub spectra: Vec<(Vec<f64>, SpectralFunction)>,
}

impl SweepResult {
    pub fn has_ratio(&self) -> bool {
        self.axes.iter().any(|a| a.parameter == Parameter::Detuning)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.status != RowStatus::Ok).count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker count; `None` uses rayon's global pool.
    pub threads: Option<usize>,
    pub keep_spectra: bool,
}

struct PointResult {
    total: f64,
    peak: f64,
    distortion: f64,
    ratios: Vec<f64>,
    status: RowStatus,
    spectrum: Option<SpectralFunction>,
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, SweepOptions::default())
}

/// Evaluates every point of the sweep grid. Rows come out with the first
/// axis varying slowest, whatever the worker count.
pub fn run_sweep_with(cfg: &ExperimentConfig, opts: SweepOptions) -> Result<SweepResult> {
    match opts.threads {
        None => Ok(sweep(cfg, opts.keep_spectra)),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| AppError::Pool(e.to_string()))?;
            Ok(pool.install(|| sweep(cfg, opts.keep_spectra)))
        }
    }
}

fn sweep(cfg: &ExperimentConfig, keep_spectra: bool) -> SweepResult {
    let axes = cfg.sweep.clone();
    let values: Vec<Vec<f64>> = axes.iter().map(SweepAxis::values).collect();
    let detuning_axis = axes.iter().position(|a| a.parameter == Parameter::Detuning);
    let detunings: Vec<f64> = detuning_axis.map_or_else(Vec::new, |i| values[i].clone());
    let model_axes: Vec<usize> = (0..axes.len()).filter(|&i| Some(i) != detuning_axis).collect();

    let model_points: Vec<Vec<f64>> = cartesian(&model_axes.iter().map(|&i| values[i].len()).collect::<Vec<_>>())
        .into_iter()
        .map(|idx| idx.iter().zip(&model_axes).map(|(&k, &a)| values[a][k]).collect())
        .collect();

    let results: Vec<PointResult> = model_points
        .par_iter()
        .map(|coords| {
            let mut point = cfg.clone();
            for (&a, &v) in model_axes.iter().zip(coords) {
                point = point.with(axes[a].parameter, v);
            }
            evaluate(&point, &detunings, keep_spectra)
        })
        .collect();

    let sizes: Vec<usize> = values.iter().map(Vec::len).collect();
    let mut rows = Vec::new();
    for idx in cartesian(&sizes) {
        let mut model_index = 0;
        for &a in &model_axes {
            model_index = model_index * sizes[a] + idx[a];
        }
        let r = &results[model_index];
        let ratio = detuning_axis.map(|d| r.ratios.get(idx[d]).copied().unwrap_or(f64::NAN));
        let status = match (&r.status, ratio) {
            (RowStatus::Ok, Some(x)) if !x.is_finite() => RowStatus::NonFinite,
            (s, _) => s.clone(),
        };
        rows.push(SweepRow {
            coords: idx.iter().enumerate().map(|(a, &k)| values[a][k]).collect(),
            total_probability: r.total,
            peak_ratio: r.peak,
            distortion_ratio_center: r.distortion,
            ratio,
            status,
        });
    }

    let spectra = model_points
        .into_iter()
        .zip(results)
        .filter_map(|(c, r)| r.spectrum.map(|s| (c, s)))
        .collect();
    SweepResult { axes, rows, spectra }
}

fn evaluate(cfg: &ExperimentConfig, detunings: &[f64], keep_spectrum: bool) -> PointResult {
    let failed = |msg: String| PointResult {
        total: f64::NAN,
        peak: f64::NAN,
        distortion: f64::NAN,
        ratios: Vec::new(),
        status: RowStatus::Failed(msg),
        spectrum: None,
    };
    let exp = match Experiment::from_config(cfg) {
        Ok(e) => e,
        Err(e) => return failed(e.to_string()),
    };
    let echo = match exp.echo() {
        Ok(e) => e,
        Err(e) => return failed(e.to_string()),
    };
    let ratios = match ratio_rows(&exp, &echo, detunings) {
        Ok(rows) => rows.into_iter().map(|r| r.ratio).collect(),
        Err(e) => return failed(e.to_string()),
    };
    let (total, peak, distortion) = (total_probability(&echo), peak_ratio(&echo), distortion_ratio_center(&exp));
    let status = if [total, peak, distortion].iter().all(|v| v.is_finite()) {
        RowStatus::Ok
    } else {
        RowStatus::NonFinite
    };
    PointResult {
        total,
        peak,
        distortion,
        ratios,
        status,
        spectrum: keep_spectrum.then_some(echo.spectrum),
    }
}

/// Index tuples of a grid with the given sizes, last index fastest.
fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Nine significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn csv_header(result: &SweepResult) -> Vec<String> {
    let mut cols: Vec<String> = result.axes.iter().map(|a| a.parameter.key().to_string()).collect();
    cols.extend(METRIC_COLUMNS.iter().map(|s| s.to_string()));
    if result.has_ratio() {
        cols.push("ratio".into());
    }
    cols.push("status".into());
    cols
}

pub fn write_csv_to<W: Write>(result: &SweepResult, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(result))?;
    for row in &result.rows {
        let mut rec: Vec<String> = row.coords.iter().map(|&v| format_value(v)).collect();
        rec.push(format_value(row.total_probability));
        rec.push(format_value(row.peak_ratio));
        rec.push(format_value(row.distortion_ratio_center));
        if let Some(r) = row.ratio {
            rec.push(format_value(r));
        }
        rec.push(row.status.label());
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| AppError::io(path, e))?;
    write_csv_to(result, std::io::BufWriter::new(file)).map_err(|e| {
        let io = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        AppError::io(path, io)
    })
}

/// Two columns: detuning_per_s and |F|².
pub fn spectrum_table(spectrum: &SpectralFunction) -> String {
    let mut out = String::from("detuning_per_s\tmagnitude_squared\n");
    for (u, v) in spectrum.grid().points().zip(spectrum.values()) {
        out.push_str(&format!("{}\t{}\n", format_value(u), format_value(v.norm_sqr())));
    }
    out
}

pub fn write_spectrum(spectrum: &SpectralFunction, path: &Path) -> Result<()> {
    std::fs::write(path, spectrum_table(spectrum)).map_err(|e| AppError::io(path, e))
}
