//! Sweep configuration files and result encoding.
//!
//! Configs are TOML. A file may name a `preset` and override any of its
//! fields, or spell out a full sweep:
//!
//! ```toml
//! kind = "zeno"
//! n_collisions = 1000
//! delta = 0.1
//! outputs = ["redundancy", "redundancy_estimate"]
//!
//! [fixed]
//! omega = 5.0
//! tau = 0.05
//!
//! [[axes]]
//! param = "rabi"
//! min = 0.0
//! max = 1.5707963267948966
//! points = 512
//! ```
//!
//! Results are written as CSV tables or a single JSON document. Every float
//! carries 17 significant digits, `+∞` is written `inf`, and a fragment size
//! that does not exist is written `NoDecoherence`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::branch::{FragmentSize, SystemAmplitudes, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::sweep::{
    Axis, AxisValues, FixedParams, Output, Preset, RunMetadata, SweepConfig, SweepResult,
};

/// Everything a config file may contain; each field overrides the preset.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<Preset>,
    kind: Option<ModelKind>,
    fixed: Option<FixedParams>,
    axes: Option<Vec<Axis>>,
    n_collisions: Option<usize>,
    delta: Option<f64>,
    amps: Option<SystemAmplitudes>,
    outputs: Option<BTreeSet<Output>>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Line on which a validated field was written, if it can be found.
fn line_of_field(text: &str, field: &str) -> Option<usize> {
    let lines: Vec<&str> = text.lines().map(str::trim_start).collect();
    if let Some(rest) = field.strip_prefix("axes[") {
        let index: usize = rest.split(']').next()?.parse().ok()?;
        return lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.starts_with("[[axes]]"))
            .nth(index)
            .map(|(i, _)| i + 1);
    }
    let key = field.rsplit('.').next()?;
    let section = field
        .contains('.')
        .then(|| field.split('.').next())
        .flatten();
    let mut in_section = section.is_none();
    for (i, l) in lines.iter().enumerate() {
        if l.starts_with('[') {
            in_section = section.is_some_and(|s| l.trim_end() == format!("[{s}]"));
            continue;
        }
        let is_key = l
            .strip_prefix(key)
            .is_some_and(|r| r.trim_start().starts_with('='));
        if in_section && is_key {
            return Some(i + 1);
        }
    }
    None
}

fn missing(field: &str) -> Error {
    Error::Parse {
        location: field.to_string(),
        message: "missing field (required when no preset is given)".into(),
    }
}

/// Parses and validates a TOML sweep config.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                format!("line {line}, column {col}")
            }
            None => "config".to_string(),
        };
        Error::Parse {
            location,
            message: e.message().trim().to_string(),
        }
    })?;

    let mut cfg = match raw.preset {
        Some(p) => p.config(),
        None => SweepConfig {
            kind: raw.kind.ok_or_else(|| missing("kind"))?,
            fixed: FixedParams::default(),
            axes: raw.axes.clone().ok_or_else(|| missing("axes"))?,
            n_collisions: raw.n_collisions.ok_or_else(|| missing("n_collisions"))?,
            delta: DEFAULT_DELTA,
            amps: SystemAmplitudes::uniform(),
            outputs: raw.outputs.clone().ok_or_else(|| missing("outputs"))?,
        },
    };
    if let Some(kind) = raw.kind {
        cfg.kind = kind;
    }
    if let Some(axes) = raw.axes {
        for a in &axes {
            cfg.fixed.set(a.param, None);
        }
        cfg.axes = axes;
    }
    if let Some(fixed) = raw.fixed {
        cfg.fixed = fixed.merged_over(cfg.fixed);
    }
    if let Some(n) = raw.n_collisions {
        cfg.n_collisions = n;
    }
    if let Some(delta) = raw.delta {
        cfg.delta = delta;
    }
    if let Some(amps) = raw.amps {
        cfg.amps = amps;
    }
    if let Some(outputs) = raw.outputs {
        cfg.outputs = outputs;
    }

    cfg.validate().map_err(|e| match e {
        Error::InvalidConfig { field, reason } => {
            let location = match line_of_field(text, &field) {
                Some(line) => format!("line {line}, {field}"),
                None => field,
            };
            Error::Parse {
                location,
                message: reason,
            }
        }
        other => other,
    })?;
    Ok(cfg)
}

/// Reads and parses a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<SweepConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

/// Serializes a config in the format accepted by [`parse_config`].
pub fn to_toml(cfg: &SweepConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Parse {
        location: "config".into(),
        message: e.to_string(),
    })
}

/// Formats a float with 17 significant digits, or `inf`/`-inf`/`nan`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Column names of the per-point table.
pub fn table_header(result: &SweepResult) -> Vec<&'static str> {
    let cfg = &result.config;
    let mut cols: Vec<&'static str> = cfg.axes.iter().map(|a| a.param.column()).collect();
    if cfg.wants(Output::Kappa) {
        cols.push("kappa");
    }
    if cfg.wants(Output::Redundancy) {
        cols.push("R");
    }
    if cfg.wants(Output::RedundancyEstimate) {
        cols.push("R_estimate");
    }
    if cfg.wants(Output::Redundancy) {
        cols.push("m_delta");
    }
    cols
}

/// One row per grid point.
pub fn table_csv(result: &SweepResult) -> String {
    let cfg = &result.config;
    let mut out = table_header(result).join(",");
    out.push('\n');
    for pt in &result.points {
        let mut fields: Vec<String> = pt.coords.iter().map(|&c| format_f64(c)).collect();
        if cfg.wants(Output::Kappa) {
            fields.push(format_f64(pt.kappa));
        }
        if cfg.wants(Output::Redundancy) {
            fields.push(format_f64(pt.redundancy));
        }
        if cfg.wants(Output::RedundancyEstimate) {
            fields.push(format_f64(pt.redundancy_estimate));
        }
        if cfg.wants(Output::Redundancy) {
            fields.push(pt.m_delta.to_string());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Column names of the long-form mutual-information surface.
pub fn surface_header(result: &SweepResult) -> Vec<&'static str> {
    let mut cols: Vec<&'static str> = result
        .config
        .axes
        .iter()
        .map(|a| a.param.column())
        .collect();
    cols.extend(["m", "I_bits"]);
    cols
}

/// Long-form surface `(params, m, I_bits)`, or `None` if it was not requested.
pub fn surface_csv(result: &SweepResult) -> Option<String> {
    if !result.has_surface() {
        return None;
    }
    let mut out = surface_header(result).join(",");
    out.push('\n');
    for pt in &result.points {
        let prefix: String = pt.coords.iter().map(|&c| format_f64(c) + ",").collect();
        for (m, i) in pt.mutual_info_bits.iter().flatten().enumerate() {
            let _ = writeln!(out, "{prefix}{m},{}", format_f64(*i));
        }
    }
    Some(out)
}

/// A JSON number, or a string for values JSON cannot represent.
#[derive(Serialize)]
#[serde(untagged)]
enum Num {
    F(f64),
    S(String),
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Num::F(x)
        } else {
            Num::S(format_f64(x))
        }
    }
}

#[derive(Serialize)]
struct JsonPoint<'a> {
    coords: &'a [f64],
    kappa: f64,
    m_delta: FragmentSize,
    redundancy: f64,
    redundancy_estimate: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    mutual_info_bits: Option<&'a [f64]>,
}

#[derive(Serialize)]
struct JsonResult<'a> {
    schema_version: &'a str,
    config: &'a SweepConfig,
    axes: &'a [AxisValues],
    points: Vec<JsonPoint<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<&'a RunMetadata>,
}

/// Compact JSON whose floats always carry 17 significant digits.
struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
}

/// JSON encoding of a sweep. Without metadata the bytes depend only on the config.
pub fn to_json(result: &SweepResult, include_metadata: bool) -> Result<String> {
    let doc = JsonResult {
        schema_version: &result.schema_version,
        config: &result.config,
        axes: &result.axes,
        points: result
            .points
            .iter()
            .map(|p| JsonPoint {
                coords: &p.coords,
                kappa: p.kappa,
                m_delta: p.m_delta,
                redundancy: p.redundancy,
                redundancy_estimate: p.redundancy_estimate.into(),
                mutual_info_bits: p.mutual_info_bits.as_deref(),
            })
            .collect(),
        metadata: include_metadata.then_some(&result.metadata),
    };
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    doc.serialize(&mut ser).map_err(|e| Error::Parse {
        location: "json".into(),
        message: e.to_string(),
    })?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
