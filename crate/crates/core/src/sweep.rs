//! Parameter grids over the collision models, including the three figure presets.
//!
//! Every grid point is an independent pure computation. Points are evaluated
//! on a rayon pool and collected back in grid order, so the result does not
//! depend on the number of workers.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::{
    redundancy_estimate, EntropyTable, FragmentSize, SystemAmplitudes, DEFAULT_DELTA,
};
use crate::error::{Error, Result};
use crate::models::{kappa_closed_form, ModelKind, ModelParams};

/// Result format tag carried by every serialized sweep.
pub const SCHEMA_VERSION: &str = "zeno-darwin.sweep/1";

/// A model parameter that can be held fixed or swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Omega,
    Tau,
    Rabi,
    Detuning,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Omega, Param::Tau, Param::Rabi, Param::Detuning];

    /// Key used in config files and on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Param::Omega => "omega",
            Param::Tau => "tau",
            Param::Rabi => "rabi",
            Param::Detuning => "detuning",
        }
    }

    /// Column name in CSV output.
    pub fn column(self) -> &'static str {
        match self {
            Param::Omega => "omega",
            Param::Tau => "tau",
            Param::Rabi => "Omega",
            Param::Detuning => "epsilon",
        }
    }

    fn set(self, p: &mut ModelParams, v: f64) {
        match self {
            Param::Omega => p.omega = v,
            Param::Tau => p.tau = v,
            Param::Rabi => p.rabi = v,
            Param::Detuning => p.detuning = v,
        }
    }

    /// Checks one coordinate against the model's domain with every other
    /// coordinate at a value known to be valid.
    pub fn check(self, kind: ModelKind, v: f64) -> Result<()> {
        let mut p = ModelParams {
            kind,
            omega: 1.0,
            tau: 1.0,
            rabi: 0.0,
            detuning: 0.0,
        };
        self.set(&mut p, v);
        p.validate()
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| Error::range(format!("unknown parameter `{s}`")))
    }
}

/// An inclusive, evenly spaced range of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(param: Param, min: f64, max: f64, points: usize) -> Self {
        Self {
            param,
            min,
            max,
            points,
        }
    }

    /// Grid values; the first is exactly `min` and the last exactly `max`.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points.saturating_sub(1).max(1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.max
                } else {
                    self.min + (self.max - self.min) * (k as f64 / last)
                }
            })
            .collect()
    }
}

/// Parameters held constant across the grid. Unset Ω and ε default to 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
}

impl FixedParams {
    pub fn get(&self, param: Param) -> Option<f64> {
        match param {
            Param::Omega => self.omega,
            Param::Tau => self.tau,
            Param::Rabi => self.rabi,
            Param::Detuning => self.detuning,
        }
    }

    pub fn set(&mut self, param: Param, v: Option<f64>) {
        match param {
            Param::Omega => self.omega = v,
            Param::Tau => self.tau = v,
            Param::Rabi => self.rabi = v,
            Param::Detuning => self.detuning = v,
        }
    }

    /// Fills unset fields from `other`.
    pub fn merged_over(self, other: FixedParams) -> FixedParams {
        let mut out = other;
        for p in Param::ALL {
            if let Some(v) = self.get(p) {
                out.set(p, Some(v));
            }
        }
        out
    }
}

/// Quantities a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Kappa,
    Redundancy,
    RedundancyEstimate,
    MutualInfoSurface,
}

/// A validated description of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: ModelKind,
    #[serde(default)]
    pub fixed: FixedParams,
    pub axes: Vec<Axis>,
    pub n_collisions: usize,
    pub delta: f64,
    #[serde(default)]
    pub amps: SystemAmplitudes,
    pub outputs: BTreeSet<Output>,
}

fn invalid(field: impl Into<String>, reason: impl fmt::Display) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        reason: reason.to_string(),
    }
}

fn reason(e: Error) -> String {
    match e {
        Error::InvalidParams(s) | Error::OutOfRange(s) => s,
        other => other.to_string(),
    }
}

impl SweepConfig {
    pub fn wants(&self, out: Output) -> bool {
        self.outputs.contains(&out)
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(invalid(
                "axes",
                format!("expected 1 or 2 axes, got {}", self.axes.len()),
            ));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            let field = format!("axes[{i}] ({})", axis.param);
            if self.axes[..i].iter().any(|a| a.param == axis.param) {
                return Err(invalid(field, "parameter already swept by another axis"));
            }
            if axis.points < 2 {
                return Err(invalid(
                    field,
                    format!("points = {} must be ≥ 2", axis.points),
                ));
            }
            if !(axis.min <= axis.max) {
                return Err(invalid(
                    field,
                    format!("min = {} exceeds max = {}", axis.min, axis.max),
                ));
            }
            for v in [axis.min, axis.max] {
                axis.param
                    .check(self.kind, v)
                    .map_err(|e| invalid(field.clone(), reason(e)))?;
            }
            if self.fixed.get(axis.param).is_some() {
                return Err(invalid(
                    format!("fixed.{}", axis.param),
                    "parameter is also swept by an axis",
                ));
            }
        }
        for p in Param::ALL {
            let swept = self.axes.iter().any(|a| a.param == p);
            match self.fixed.get(p) {
                Some(v) => p
                    .check(self.kind, v)
                    .map_err(|e| invalid(format!("fixed.{p}"), reason(e)))?,
                None if !swept && matches!(p, Param::Omega | Param::Tau) => {
                    return Err(invalid(format!("fixed.{p}"), "required when not swept"));
                }
                None => {}
            }
        }
        if self.n_collisions == 0 {
            return Err(invalid("n_collisions", "must be ≥ 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(
                "delta",
                format!("δ = {} outside (0, 1)", self.delta),
            ));
        }
        self.amps
            .validate()
            .map_err(|e| invalid("amps", reason(e)))?;
        if self.outputs.is_empty() {
            return Err(invalid("outputs", "at least one output is required"));
        }
        Ok(())
    }

    fn base_params(&self) -> ModelParams {
        let f = &self.fixed;
        ModelParams {
            kind: self.kind,
            omega: f.omega.unwrap_or(0.0),
            tau: f.tau.unwrap_or(1.0),
            rabi: f.rabi.unwrap_or(0.0),
            detuning: f.detuning.unwrap_or(0.0),
        }
    }

    /// Grid coordinates in row-major order (first axis slowest).
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        let mut rows = vec![Vec::new()];
        for vals in &values {
            rows = rows
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |&v| {
                        let mut row = prefix.clone();
                        row.push(v);
                        row
                    })
                })
                .collect();
        }
        rows
    }

    /// Model parameters at the given grid coordinates.
    pub fn params_at(&self, coords: &[f64]) -> Result<ModelParams> {
        let mut p = self.base_params();
        for (axis, &v) in self.axes.iter().zip(coords) {
            axis.param.set(&mut p, v);
        }
        p.validate()?;
        Ok(p)
    }
}

/// The three figure reproductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
}

/// Collisions used by every preset.
pub const PRESET_COLLISIONS: usize = 1000;
/// Collision time used by every preset.
pub const PRESET_TAU: f64 = 0.05;
/// Coupling used by the Zeno and anti-Zeno presets.
pub const PRESET_OMEGA: f64 = 5.0;
/// Points on a one-dimensional preset axis.
pub const PRESET_POINTS_1D: usize = 512;
/// Points per axis on the two-dimensional preset.
pub const PRESET_POINTS_2D: usize = 128;
/// Largest detuning on the anti-Zeno preset.
pub const PRESET_MAX_DETUNING: f64 = 3.0;

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig1, Preset::Fig2, Preset::Fig3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
        }
    }

    pub fn config(self) -> SweepConfig {
        let common = |kind, fixed, axes, surface: bool| {
            let mut outputs = BTreeSet::from([Output::Redundancy, Output::RedundancyEstimate]);
            if surface {
                outputs.insert(Output::MutualInfoSurface);
            }
            SweepConfig {
                kind,
                fixed,
                axes,
                n_collisions: PRESET_COLLISIONS,
                delta: DEFAULT_DELTA,
                amps: SystemAmplitudes::uniform(),
                outputs,
            }
        };
        let tau_only = FixedParams {
            tau: Some(PRESET_TAU),
            ..Default::default()
        };
        let omega_tau = FixedParams {
            omega: Some(PRESET_OMEGA),
            ..tau_only
        };
        match self {
            Preset::Fig1 => {
                // ω ∈ (0, π/(2τ)]: the open end is approached on the same spacing.
                let top = FRAC_PI_2 / PRESET_TAU;
                let step = top / PRESET_POINTS_1D as f64;
                let axis = Axis::new(Param::Omega, step, top, PRESET_POINTS_1D);
                common(ModelKind::Base, tau_only, vec![axis], true)
            }
            Preset::Fig2 => {
                let axis = Axis::new(Param::Rabi, 0.0, FRAC_PI_2, PRESET_POINTS_1D);
                common(ModelKind::Zeno, omega_tau, vec![axis], true)
            }
            Preset::Fig3 => {
                let axes = vec![
                    Axis::new(Param::Rabi, 0.0, FRAC_PI_2, PRESET_POINTS_2D),
                    Axis::new(Param::Detuning, 0.0, PRESET_MAX_DETUNING, PRESET_POINTS_2D),
                ];
                common(ModelKind::AntiZeno, omega_tau, axes, false)
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Config of the named figure preset.
pub fn figure_preset(name: &str) -> Result<SweepConfig> {
    Ok(name.parse::<Preset>()?.config())
}

/// Scalars computed at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub coords: Vec<f64>,
    /// Signed closed-form overlap.
    pub kappa: f64,
    pub m_delta: FragmentSize,
    pub redundancy: f64,
    /// `−n ln|κ|`, possibly `+∞`.
    pub redundancy_estimate: f64,
    /// `I(S, F_m)` for `m = 0..=n`, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutual_info_bits: Option<Vec<f64>>,
}

/// Grid values along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisValues {
    pub param: Param,
    pub values: Vec<f64>,
}

/// How a sweep was run; excluded from determinism comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub workers: usize,
    pub elapsed_seconds: f64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: String,
    pub config: SweepConfig,
    pub axes: Vec<AxisValues>,
    pub points: Vec<PointResult>,
    pub metadata: RunMetadata,
}

impl SweepResult {
    pub fn has_surface(&self) -> bool {
        self.config.wants(Output::MutualInfoSurface)
    }
}

/// Evaluates one grid point.
pub fn evaluate_point(cfg: &SweepConfig, coords: &[f64]) -> Result<PointResult> {
    let p = cfg.params_at(coords)?;
    let n = cfg.n_collisions;
    let kappa = kappa_closed_form(&p)?;
    let kappa_mod = kappa.abs().min(1.0);
    let table = EntropyTable::new(kappa_mod, n, &cfg.amps)?;
    let m_delta = table.fragment_size_linear(n, cfg.delta);
    let redundancy = match m_delta {
        FragmentSize::Size(m) => n as f64 / m as f64,
        FragmentSize::NoDecoherence => 0.0,
    };
    let mutual_info_bits = cfg
        .wants(Output::MutualInfoSurface)
        .then(|| (0..=n).map(|m| table.mutual_information(n, m)).collect());
    Ok(PointResult {
        coords: coords.to_vec(),
        kappa,
        m_delta,
        redundancy,
        redundancy_estimate: redundancy_estimate(kappa_mod, n)?,
        mutual_info_bits,
    })
}

/// Runs the sweep on rayon's global pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let workers = rayon::current_num_threads();
    execute(cfg, workers)
}

/// Runs the sweep on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(cfg: &SweepConfig, workers: usize) -> Result<SweepResult> {
    cfg.validate()?;
    if workers == 0 {
        return Err(invalid("workers", "must be ≥ 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid("workers", e))?;
    pool.install(|| execute(cfg, workers))
}

fn execute(cfg: &SweepConfig, workers: usize) -> Result<SweepResult> {
    let start = Instant::now();
    let points = cfg
        .grid()
        .par_iter()
        .map(|coords| evaluate_point(cfg, coords))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        schema_version: SCHEMA_VERSION.to_string(),
        config: cfg.clone(),
        axes: cfg
            .axes
            .iter()
            .map(|a| AxisValues {
                param: a.param,
                values: a.values(),
            })
            .collect(),
        points,
        metadata: RunMetadata {
            workers,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}
