//! Line-oriented experiment configuration.
//!
//! ```text
//! [medium]
//! alpha_per_cm = 1
//! delta_n_per_s = 1e9
//! length_cm = 1
//! omega21_per_s = 1e10
//!
//! [photon]
//! width_per_s = 7e8
//!
//! [sweep]
//! length_cm = 1, 4, 31
//! ```
//!
//! Units are part of the key name. Every problem found is reported, each
//! with the line it refers to.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use echomem::mapping::{AlphaConvention, DEFAULT_OMEGA31};

/// Smallest frequency grid accepted.
pub const MIN_GRID_POINTS: usize = 128;
/// Grid size used when `photon.grid_points` is absent.
pub const DEFAULT_GRID_POINTS: usize = 4096;
/// Default half span in units of max(δω_ph, Δ_n).
pub const DEFAULT_SPAN_WIDTHS: f64 = 25.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MediumParams {
    pub alpha_per_cm: f64,
    pub delta_n_per_s: f64,
    pub length_cm: f64,
    pub omega21_per_s: f64,
    pub omega31_per_s: f64,
    pub convention: AlphaConvention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonParams {
    pub width_per_s: f64,
    pub carrier_offset_per_s: f64,
    /// `None` → ±25·max(δω_ph, Δ_n).
    pub grid_half_span_per_s: Option<f64>,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseParams {
    pub area1_rad: f64,
    pub area2_rad: f64,
    /// `None` → flat sech filter over the grid.
    pub duration_s: Option<f64>,
    pub t1_s: f64,
    pub t2_s: f64,
    pub tau_s: f64,
    pub phi21_rad: f64,
    pub phase_bar_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputParams {
    pub csv: Option<PathBuf>,
    pub spectrum_dir: Option<PathBuf>,
}

/// Quantities a sweep axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parameter {
    Alpha,
    DeltaN,
    Length,
    Omega21,
    Omega31,
    PhotonWidth,
    CarrierOffset,
    Area,
    PulseDuration,
    /// Evaluation point of the normalized spectral curve; not a model input.
    Detuning,
}

impl Parameter {
    pub const ALL: [Parameter; 10] = [
        Parameter::Alpha,
        Parameter::DeltaN,
        Parameter::Length,
        Parameter::Omega21,
        Parameter::Omega31,
        Parameter::PhotonWidth,
        Parameter::CarrierOffset,
        Parameter::Area,
        Parameter::PulseDuration,
        Parameter::Detuning,
    ];

    /// Key used in `[sweep]` and as the CSV column name.
    pub fn key(self) -> &'static str {
        match self {
            Parameter::Alpha => "alpha_per_cm",
            Parameter::DeltaN => "delta_n_per_s",
            Parameter::Length => "length_cm",
            Parameter::Omega21 => "omega21_per_s",
            Parameter::Omega31 => "omega31_per_s",
            Parameter::PhotonWidth => "width_per_s",
            Parameter::CarrierOffset => "carrier_offset_per_s",
            Parameter::Area => "area_rad",
            Parameter::PulseDuration => "duration_s",
            Parameter::Detuning => "detuning_per_s",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.key() == key)
    }

    fn range(self) -> Range {
        match self {
            Parameter::Alpha => Range::NonNegative,
            Parameter::CarrierOffset | Parameter::Detuning => Range::Any,
            Parameter::Area => Range::NonNegative,
            _ => Range::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub parameter: Parameter,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    /// `count` evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub medium: MediumParams,
    pub photon: PhotonParams,
    pub pulses: PulseParams,
    /// In declaration order; the first axis varies slowest.
    pub sweep: Vec<SweepAxis>,
    pub output: OutputParams,
}

impl ExperimentConfig {
    /// Value of a model parameter in this configuration.
    pub fn get(&self, p: Parameter) -> Option<f64> {
        Some(match p {
            Parameter::Alpha => self.medium.alpha_per_cm,
            Parameter::DeltaN => self.medium.delta_n_per_s,
            Parameter::Length => self.medium.length_cm,
            Parameter::Omega21 => self.medium.omega21_per_s,
            Parameter::Omega31 => self.medium.omega31_per_s,
            Parameter::PhotonWidth => self.photon.width_per_s,
            Parameter::CarrierOffset => self.photon.carrier_offset_per_s,
            Parameter::Area => self.pulses.area1_rad,
            Parameter::PulseDuration => self.pulses.duration_s?,
            Parameter::Detuning => return None,
        })
    }

    /// Copy with one model parameter replaced; `Detuning` leaves it unchanged.
    pub fn with(&self, p: Parameter, value: f64) -> Self {
        let mut c = self.clone();
        match p {
            Parameter::Alpha => c.medium.alpha_per_cm = value,
            Parameter::DeltaN => c.medium.delta_n_per_s = value,
            Parameter::Length => c.medium.length_cm = value,
            Parameter::Omega21 => c.medium.omega21_per_s = value,
            Parameter::Omega31 => c.medium.omega31_per_s = value,
            Parameter::PhotonWidth => c.photon.width_per_s = value,
            Parameter::CarrierOffset => c.photon.carrier_offset_per_s = value,
            Parameter::Area => {
                c.pulses.area1_rad = value;
                c.pulses.area2_rad = value;
            }
            Parameter::PulseDuration => c.pulses.duration_s = Some(value),
            Parameter::Detuning => {}
        }
        c
    }

    pub fn grid_half_span(&self) -> f64 {
        self.photon.grid_half_span_per_s.unwrap_or(
            DEFAULT_SPAN_WIDTHS * self.photon.width_per_s.max(self.medium.delta_n_per_s),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// All violations found in one configuration, in line order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Range {
    Any,
    Positive,
    NonNegative,
}

impl Range {
    fn check(self, v: f64) -> Result<f64, String> {
        let ok = v.is_finite()
            && match self {
                Range::Any => true,
                Range::Positive => v > 0.0,
                Range::NonNegative => v >= 0.0,
            };
        if ok {
            Ok(v)
        } else {
            Err(match self {
                Range::Any => format!("must be a finite number, got {v}"),
                Range::Positive => format!("must be > 0, got {v}"),
                Range::NonNegative => format!("must be >= 0, got {v}"),
            })
        }
    }
}

const SECTIONS: [&str; 5] = ["medium", "photon", "pulses", "sweep", "output"];

/// Every key outside `[sweep]`, with whether it is required.
pub const KEYS: &[(&str, &str, bool)] = &[
    ("medium", "alpha_per_cm", true),
    ("medium", "delta_n_per_s", true),
    ("medium", "length_cm", true),
    ("medium", "omega21_per_s", true),
    ("medium", "omega31_per_s", false),
    ("medium", "alpha_convention", false),
    ("photon", "width_per_s", true),
    ("photon", "carrier_offset_per_s", false),
    ("photon", "grid_half_span_per_s", false),
    ("photon", "grid_points", false),
    ("pulses", "area_rad", false),
    ("pulses", "area1_rad", false),
    ("pulses", "area2_rad", false),
    ("pulses", "duration_s", false),
    ("pulses", "t1_s", false),
    ("pulses", "t2_s", false),
    ("pulses", "tau_s", false),
    ("pulses", "phi21_rad", false),
    ("pulses", "phase_bar_per_s", false),
    ("output", "csv", false),
    ("output", "spectrum_dir", false),
];

/// Help text listing every key.
pub fn key_reference() -> String {
    let mut out = String::new();
    let mut last = "";
    for &(section, key, required) in KEYS {
        if section != last {
            out.push_str(&format!("[{section}]\n"));
            last = section;
        }
        out.push_str(&format!("  {key}{}\n", if required { "  (required)" } else { "" }));
    }
    out.push_str("[sweep]\n  <parameter> = min, max, count   parameter one of:");
    for p in Parameter::ALL {
        out.push(' ');
        out.push_str(p.key());
    }
    out.push('\n');
    out
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

struct Parser<'a> {
    errors: Vec<ConfigError>,
    values: BTreeMap<(&'a str, &'a str), Entry<'a>>,
    sweep: Vec<(usize, &'a str, &'a str)>,
    section_lines: BTreeMap<&'a str, usize>,
    end_line: usize,
}

impl<'a> Parser<'a> {
    fn error(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line,
            message: message.into(),
        });
    }

    fn scan(&mut self, text: &'a str) {
        let mut section: Option<&'a str> = None;
        let mut known_section = true;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            self.end_line = line + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']').map(str::trim) else {
                    self.error(line, format!("malformed section header `{content}`"));
                    continue;
                };
                known_section = SECTIONS.contains(&name);
                if !known_section {
                    self.error(line, format!("unknown section [{name}]"));
                } else if self.section_lines.insert(name, line).is_some() {
                    self.error(line, format!("section [{name}] appears twice"));
                }
                section = Some(name);
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                self.error(line, format!("expected `key = value`, got `{content}`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(sec) = section else {
                self.error(line, format!("key `{key}` appears before any section"));
                continue;
            };
            if !known_section {
                continue;
            }
            if sec == "sweep" {
                if self.sweep.iter().any(|&(_, k, _)| k == key) {
                    self.error(line, format!("sweep axis `{key}` given twice"));
                } else {
                    self.sweep.push((line, key, value));
                }
                continue;
            }
            if !KEYS.iter().any(|&(s, k, _)| s == sec && k == key) {
                self.error(line, format!("unknown key `{key}` in [{sec}]"));
                continue;
            }
            if let Some(prev) = self.values.get(&(sec, key)) {
                let first = prev.line;
                self.error(line, format!("key `{sec}.{key}` already set on line {first}"));
                continue;
            }
            self.values.insert((sec, key), Entry { line, value });
        }
        self.end_line = self.end_line.max(1);
    }

    fn raw(&self, section: &str, key: &str) -> Option<(usize, &'a str)> {
        self.values.get(&(section, key)).map(|e| (e.line, e.value))
    }

    fn number(&mut self, section: &str, key: &str, range: Range) -> Option<f64> {
        let (line, value) = self.raw(section, key)?;
        match value.parse::<f64>() {
            Ok(v) => match range.check(v) {
                Ok(v) => Some(v),
                Err(msg) => {
                    self.error(line, format!("{section}.{key} {msg}"));
                    None
                }
            },
            Err(_) => {
                self.error(line, format!("{section}.{key}: `{value}` is not a number"));
                None
            }
        }
    }

    fn required(&mut self, section: &str, key: &str, range: Range) -> f64 {
        if self.raw(section, key).is_none() {
            let line = self.section_lines.get(section).copied().unwrap_or(self.end_line);
            self.error(line, format!("missing required key `{section}.{key}`"));
            return f64::NAN;
        }
        self.number(section, key, range).unwrap_or(f64::NAN)
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.raw(section, key).map_or(self.end_line, |(l, _)| l)
    }
}

/// Parses and validates a configuration, collecting every violation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut p = Parser {
        errors: Vec::new(),
        values: BTreeMap::new(),
        sweep: Vec::new(),
        section_lines: BTreeMap::new(),
        end_line: 1,
    };
    p.scan(text);

    let alpha = p.required("medium", "alpha_per_cm", Range::NonNegative);
    let delta_n = p.required("medium", "delta_n_per_s", Range::Positive);
    let length = p.required("medium", "length_cm", Range::Positive);
    let omega21 = p.required("medium", "omega21_per_s", Range::Positive);
    let omega31 = p
        .number("medium", "omega31_per_s", Range::Positive)
        .unwrap_or(DEFAULT_OMEGA31);
    if omega21 >= omega31 {
        let line = p.line_of("medium", "omega21_per_s");
        p.error(line, format!("medium.omega21_per_s must be below omega31_per_s = {omega31:e}"));
    }
    let convention = match p.raw("medium", "alpha_convention") {
        None => AlphaConvention::Amplitude,
        Some((_, "amplitude")) => AlphaConvention::Amplitude,
        Some((_, "intensity")) => AlphaConvention::Intensity,
        Some((line, other)) => {
            p.error(
                line,
                format!("medium.alpha_convention must be `amplitude` or `intensity`, got `{other}`"),
            );
            AlphaConvention::Amplitude
        }
    };

    let width = p.required("photon", "width_per_s", Range::Positive);
    let carrier = p
        .number("photon", "carrier_offset_per_s", Range::Any)
        .unwrap_or(0.0);
    let half_span = p.number("photon", "grid_half_span_per_s", Range::Positive);
    let grid_points = match p.raw("photon", "grid_points") {
        None => DEFAULT_GRID_POINTS,
        Some((line, v)) => match v.parse::<usize>() {
            Ok(n) if n >= MIN_GRID_POINTS => n,
            Ok(n) => {
                p.error(line, format!("photon.grid_points must be >= {MIN_GRID_POINTS}, got {n}"));
                DEFAULT_GRID_POINTS
            }
            Err(_) => {
                p.error(line, format!("photon.grid_points: `{v}` is not a whole number"));
                DEFAULT_GRID_POINTS
            }
        },
    };

    let area = p.number("pulses", "area_rad", Range::NonNegative);
    let area1 = p.number("pulses", "area1_rad", Range::NonNegative);
    let area2 = p.number("pulses", "area2_rad", Range::NonNegative);
    if area.is_some() && (area1.is_some() || area2.is_some()) {
        let line = p.line_of("pulses", "area_rad");
        p.error(line, "pulses.area_rad cannot be combined with area1_rad/area2_rad");
    }
    let theta = area.unwrap_or(std::f64::consts::PI);
    let duration = p.number("pulses", "duration_s", Range::Positive);
    let t1 = p.number("pulses", "t1_s", Range::Positive).unwrap_or(1e-8);
    let t2 = p.number("pulses", "t2_s", Range::Positive).unwrap_or(t1 + 1e-8);
    if t2 <= t1 {
        let line = p.line_of("pulses", "t2_s");
        p.error(line, format!("pulses.t2_s must exceed t1_s = {t1:e}"));
    }
    let tau = p.number("pulses", "tau_s", Range::Positive).unwrap_or(5e-9);
    let phi21 = p.number("pulses", "phi21_rad", Range::Any).unwrap_or(0.0);
    let phase_bar = p.number("pulses", "phase_bar_per_s", Range::Any).unwrap_or(0.0);

    let output = OutputParams {
        csv: p.raw("output", "csv").map(|(_, v)| PathBuf::from(v)),
        spectrum_dir: p.raw("output", "spectrum_dir").map(|(_, v)| PathBuf::from(v)),
    };

    let sweep_entries = std::mem::take(&mut p.sweep);
    let mut sweep = Vec::new();
    for (line, key, value) in sweep_entries {
        let Some(parameter) = Parameter::from_key(key) else {
            p.error(line, format!("unknown sweep parameter `{key}`"));
            continue;
        };
        match parse_axis(parameter, value) {
            Ok(axis) => sweep.push(axis),
            Err(msg) => p.error(line, format!("sweep.{key} {msg}")),
        }
    }

    if !p.errors.is_empty() {
        p.errors.sort_by_key(|e| e.line);
        return Err(ConfigErrors(p.errors));
    }
    Ok(ExperimentConfig {
        medium: MediumParams {
            alpha_per_cm: alpha,
            delta_n_per_s: delta_n,
            length_cm: length,
            omega21_per_s: omega21,
            omega31_per_s: omega31,
            convention,
        },
        photon: PhotonParams {
            width_per_s: width,
            carrier_offset_per_s: carrier,
            grid_half_span_per_s: half_span,
            grid_points,
        },
        pulses: PulseParams {
            area1_rad: area1.unwrap_or(theta),
            area2_rad: area2.unwrap_or(theta),
            duration_s: duration,
            t1_s: t1,
            t2_s: t2,
            tau_s: tau,
            phi21_rad: phi21,
            phase_bar_per_s: phase_bar,
        },
        sweep,
        output,
    })
}

fn parse_axis(parameter: Parameter, value: &str) -> Result<SweepAxis, String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let [min, max, count] = parts[..] else {
        return Err(format!("expects `min, max, count`, got `{value}`"));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    let range = parameter.range();
    let min = range.check(num(min)?).map_err(|m| format!("min {m}"))?;
    let max = range.check(num(max)?).map_err(|m| format!("max {m}"))?;
    let count: usize = count
        .parse()
        .map_err(|_| format!("count `{count}` is not a whole number"))?;
    if count < 2 {
        return Err(format!("count must be >= 2, got {count}"));
    }
    if max <= min {
        return Err(format!("max must exceed min ({min:e} .. {max:e})"));
    }
    Ok(SweepAxis {
        parameter,
        min,
        max,
        count,
    })
}
