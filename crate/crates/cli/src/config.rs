//! Run configuration: a flat TOML table of unit-suffixed quantities and
//! solver/analysis settings.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;
use timebin_core::analysis::{PeakSettings, ScanGrid};
use timebin_core::params::{GroupVelocity, PhysicalParams};
use timebin_core::propagation::{Channel, Frame, InputPulse, Method, PulseShape};
use toml::{Table, Value};

use crate::units::{parse_quantity, parse_relative_rate, Dimension};

/// Bundled preset for cold Rb-85.
pub const RB85: &str = include_str!("../presets/rb85.toml");

/// Names accepted by `--preset`.
pub const PRESETS: [&str; 1] = ["rb85"];

const REQUIRED: [&str; 8] = [
    "gamma",
    "omega",
    "v1",
    "v2",
    "density",
    "length",
    "wavelength",
    "pulse_duration",
];

const OPTIONAL: [&str; 21] = [
    "coupling_1",
    "beta_scale",
    "coupling_2",
    "pulse_center",
    "pulse_amplitude",
    "input_channel",
    "method",
    "n_t",
    "n_z",
    "window_padding",
    "frame",
    "snapshots",
    "strictness",
    "peak_threshold",
    "smoothing_window",
    "scan_min",
    "scan_max",
    "scan_step",
    "scan_complex",
    "sweep_omega_over_gamma",
    "out_dir",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error{}: {message}", at(*line))]
    Parse {
        line: Option<usize>,
        message: String,
    },
    #[error("unknown key `{key}`{}", at(*line))]
    UnknownKey { key: String, line: Option<usize> },
    #[error("missing required key `{key}`")]
    MissingKey { key: String },
    #[error("`{key}`{}: {message}", at(*line))]
    UnitMismatch {
        key: String,
        line: Option<usize>,
        message: String,
    },
    #[error("`{key}`{}: {message}", at(*line))]
    InvalidValue {
        key: String,
        line: Option<usize>,
        message: String,
    },
    #[error("unknown preset `{0}` (available: rb85)")]
    UnknownPreset(String),
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

impl ConfigError {
    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Io { .. } => "io",
            ConfigError::Parse { .. } => "parse-error",
            ConfigError::UnknownKey { .. } => "unknown-key",
            ConfigError::MissingKey { .. } => "missing-required-key",
            ConfigError::UnitMismatch { .. } => "unit-mismatch",
            ConfigError::InvalidValue { .. } => "invalid-value",
            ConfigError::UnknownPreset(_) => "unknown-preset",
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Parse { line, .. }
            | ConfigError::UnknownKey { line, .. }
            | ConfigError::UnitMismatch { line, .. }
            | ConfigError::InvalidValue { line, .. } => *line,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub method: Method,
    pub n_t: usize,
    /// `None` selects the default step count for the parameters in use.
    pub n_z: Option<usize>,
    pub window_padding: f64,
    pub frame: Frame,
    /// Extra output positions (m).
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub input: InputPulse,
    /// Multiplier on the parametric coupling; `0` switches it off.
    pub beta_scale: f64,
    pub solver: SolverSettings,
    pub strictness: f64,
    pub peaks: PeakSettings,
    pub scan: ScanGrid,
    /// Rabi frequencies of the sweep in units of Gamma, ascending.
    pub sweep: Vec<f64>,
    pub out_dir: Option<PathBuf>,
}

/// Parsed table plus the line each key was defined on.
struct Source {
    table: Table,
    lines: HashMap<String, usize>,
}

impl Source {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = toml::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.span().map(|s| line_of_offset(text, s.start)),
            message: e.message().to_owned(),
        })?;
        let lines = table
            .keys()
            .filter_map(|key| {
                let index = text.lines().position(|l| {
                    l.trim_start()
                        .strip_prefix(key.as_str())
                        .is_some_and(|rest| rest.trim_start().starts_with('='))
                })?;
                Some((key.clone(), index + 1))
            })
            .collect();
        Ok(Self { table, lines })
    }

    /// Keys of `other` replace those of `self`.
    fn overlay(mut self, other: Source) -> Self {
        self.table.extend(other.table);
        self.lines.extend(other.lines);
        self
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.table.get(key)
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue {
            key: key.to_owned(),
            line: self.line(key),
            message: message.into(),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.invalid(
                key,
                format!(
                    "expected a quoted value with a unit, got {}",
                    other.type_str()
                ),
            )),
        }
    }

    fn quantity(&self, key: &str, dimension: Dimension) -> Result<Option<f64>, ConfigError> {
        self.string(key)?
            .map(|s| parse_quantity(s, dimension).map_err(|e| self.unit_error(key, e)))
            .transpose()
    }

    fn unit_error(&self, key: &str, error: crate::units::UnitError) -> ConfigError {
        ConfigError::UnitMismatch {
            key: key.to_owned(),
            line: self.line(key),
            message: error.to_string(),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) if v.is_finite() => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(self.invalid(key, format!("expected a finite number, got {other}"))),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v > 0 => Ok(Some(*v as usize)),
            Some(other) => {
                Err(self.invalid(key, format!("expected a positive integer, got {other}")))
            }
        }
    }

    fn flag(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(other) => Err(self.invalid(key, format!("expected true or false, got {other}"))),
        }
    }

    fn array(&self, key: &str) -> Result<Option<&Vec<Value>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(other) => Err(self.invalid(key, format!("expected an array, got {other}"))),
        }
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Loads the preset named `name`.
pub fn preset(name: &str) -> Result<&'static str, ConfigError> {
    match name {
        "rb85" => Ok(RB85),
        other => Err(ConfigError::UnknownPreset(other.to_owned())),
    }
}

pub fn read_file(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses a configuration; with a `base` (preset) text the keys of `text`
/// override those of the base.
pub fn load(base: Option<&str>, text: Option<&str>) -> Result<RunConfig, ConfigError> {
    let source = match (base, text) {
        (Some(base), Some(text)) => {
            let overrides = Source::parse(text)?;
            check_keys(&overrides)?;
            Source::parse(base)?.overlay(overrides)
        }
        (Some(only), None) | (None, Some(only)) => Source::parse(only)?,
        (None, None) => Source::parse("")?,
    };
    build(&source)
}

fn check_keys(source: &Source) -> Result<(), ConfigError> {
    // Report in file order so the first offending line is named.
    let mut unknown: Vec<&String> = source
        .table
        .keys()
        .filter(|k| !REQUIRED.contains(&k.as_str()) && !OPTIONAL.contains(&k.as_str()))
        .collect();
    unknown.sort_by_key(|k| source.line(k).unwrap_or(usize::MAX));
    match unknown.first() {
        Some(key) => Err(ConfigError::UnknownKey {
            key: (*key).clone(),
            line: source.line(key),
        }),
        None => Ok(()),
    }
}

fn required(source: &Source, key: &str, dimension: Dimension) -> Result<f64, ConfigError> {
    source
        .quantity(key, dimension)?
        .ok_or_else(|| ConfigError::MissingKey {
            key: key.to_owned(),
        })
}

fn group_velocity(source: &Source, field: u8) -> Result<GroupVelocity, ConfigError> {
    let direct = format!("v{field}");
    let coupling = format!("coupling_{field}");
    let v = source.quantity(&direct, Dimension::Velocity)?;
    let g = source.quantity(&coupling, Dimension::RateSquared)?;
    match (v, g) {
        (Some(v), None) => Ok(GroupVelocity::Direct(v)),
        (None, Some(g)) => Ok(GroupVelocity::Coupling(g)),
        (Some(_), Some(_)) => Err(source.invalid(
            &coupling,
            format!("give either `{direct}` or `{coupling}`, not both"),
        )),
        (None, None) => Err(ConfigError::MissingKey { key: direct }),
    }
}

fn positive(source: &Source, key: &str, value: f64) -> Result<f64, ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(source.invalid(key, format!("must be positive, got {value}")))
    }
}

fn build(source: &Source) -> Result<RunConfig, ConfigError> {
    check_keys(source)?;

    let gamma = required(source, "gamma", Dimension::Rate)?;
    let omega_text = source
        .string("omega")?
        .ok_or_else(|| ConfigError::MissingKey {
            key: "omega".into(),
        })?;
    let omega = parse_relative_rate(omega_text, "gamma", gamma)
        .map_err(|e| source.unit_error("omega", e))?;
    let field1 = group_velocity(source, 1)?;
    let field2 = group_velocity(source, 2)?;
    let density = required(source, "density", Dimension::Density)?;
    let length = required(source, "length", Dimension::Length)?;
    let wavelength = required(source, "wavelength", Dimension::Length)?;
    let pulse_duration = required(source, "pulse_duration", Dimension::Time)?;
    let params = PhysicalParams::new(
        gamma,
        omega,
        field1,
        field2,
        density,
        length,
        wavelength,
        pulse_duration,
    )
    .map_err(|e| ConfigError::InvalidValue {
        key: match &e {
            timebin_core::params::ParamsError::InvalidParameter { name, .. } => (*name).to_owned(),
        },
        line: None,
        message: e.to_string(),
    })?;

    let channel = match source.count("input_channel")? {
        None => Channel::One,
        Some(c) => Channel::try_from(c.min(255) as u8)
            .map_err(|e| source.invalid("input_channel", e.to_string()))?,
    };
    let center = source
        .quantity("pulse_center", Dimension::Time)?
        .unwrap_or(0.0);
    let amplitude = source.number("pulse_amplitude")?.unwrap_or(1.0);
    positive(source, "pulse_amplitude", amplitude)?;
    let input = InputPulse {
        shape: PulseShape::Gaussian {
            duration: pulse_duration,
            amplitude,
            center,
        },
        channel,
    };

    let beta_scale = source.number("beta_scale")?.unwrap_or(1.0);
    if beta_scale < 0.0 {
        return Err(source.invalid("beta_scale", format!("must be >= 0, got {beta_scale}")));
    }

    let method = match source.string("method")? {
        None | Some("numeric") => Method::Numeric,
        Some("analytic") => Method::Analytic,
        Some("closed-form") => Method::ClosedForm,
        Some(other) => {
            return Err(source.invalid(
                "method",
                format!("expected numeric, analytic or closed-form, got `{other}`"),
            ))
        }
    };
    let frame = match source.string("frame")? {
        None | Some("comoving") => Frame::Comoving,
        Some("lab") => Frame::Lab,
        Some(other) => {
            return Err(source.invalid("frame", format!("expected comoving or lab, got `{other}`")))
        }
    };
    let n_t = source.count("n_t")?.unwrap_or(4096);
    if n_t < 2 {
        return Err(source.invalid("n_t", "need at least 2 samples"));
    }
    let window_padding = source.number("window_padding")?.unwrap_or(5.0);
    positive(source, "window_padding", window_padding)?;
    let snapshots =
        match source.array("snapshots")? {
            None => Vec::new(),
            Some(values) => values
                .iter()
                .map(|v| match v {
                    Value::String(s) => parse_quantity(s, Dimension::Length)
                        .map_err(|e| source.unit_error("snapshots", e)),
                    other => Err(source
                        .invalid("snapshots", format!("expected quoted lengths, got {other}"))),
                })
                .collect::<Result<_, _>>()?,
        };
    let solver = SolverSettings {
        method,
        n_t,
        n_z: source.count("n_z")?,
        window_padding,
        frame,
        snapshots,
    };

    let strictness = source.number("strictness")?.unwrap_or(3.0);
    if strictness < 1.0 {
        return Err(source.invalid("strictness", format!("must be >= 1, got {strictness}")));
    }

    let defaults = PeakSettings::default();
    let peaks = PeakSettings {
        threshold: source
            .number("peak_threshold")?
            .unwrap_or(defaults.threshold),
        smoothing: source
            .count("smoothing_window")?
            .unwrap_or(defaults.smoothing),
    };
    if !(0.0..1.0).contains(&peaks.threshold) {
        return Err(source.invalid("peak_threshold", "must be in [0, 1)"));
    }

    let grid = ScanGrid::default();
    let scan = ScanGrid {
        min: source.number("scan_min")?.unwrap_or(grid.min),
        max: source.number("scan_max")?.unwrap_or(grid.max),
        step: source.number("scan_step")?.unwrap_or(grid.step),
        complex: source.flag("scan_complex")?.unwrap_or(grid.complex),
    };
    scan.check()
        .map_err(|e| source.invalid("scan_step", e.to_string()))?;

    let mut sweep = match source.array("sweep_omega_over_gamma")? {
        None => vec![6.0, 10.0, 14.0],
        Some(values) => values
            .iter()
            .map(|v| match v {
                Value::Float(x) if *x > 0.0 && x.is_finite() => Ok(*x),
                Value::Integer(x) if *x > 0 => Ok(*x as f64),
                other => Err(source.invalid(
                    "sweep_omega_over_gamma",
                    format!("expected positive numbers, got {other}"),
                )),
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    if sweep.is_empty() {
        return Err(source.invalid("sweep_omega_over_gamma", "list is empty"));
    }
    sweep.sort_by(f64::total_cmp);
    if sweep
        .windows(2)
        .any(|w| format_ratio(w[0]) == format_ratio(w[1]))
    {
        return Err(source.invalid("sweep_omega_over_gamma", "duplicate values"));
    }

    let out_dir = source.string("out_dir")?.map(PathBuf::from);

    Ok(RunConfig {
        params,
        input,
        beta_scale,
        solver,
        strictness,
        peaks,
        scan,
        sweep,
        out_dir,
    })
}

/// `Omega / Gamma` as it appears in sweep file names.
pub fn format_ratio(ratio: f64) -> String {
    format!("{ratio:.3}")
}
