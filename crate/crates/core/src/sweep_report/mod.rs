// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps and benchmark batches over the bounds, with CSV and
//! JSON serialization.

mod format;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{
    read_csv, read_json, round9, write_csv, write_json, JsonRow, JsonTable, Record, COLUMNS,
    SCHEMA_VERSION,
};

use crate::boolean_metrics::{
    sensitivity_exact, sensitivity_sampled, summarize, SensitivityError, SensitivityMode,
    SensitivityResult, EXHAUSTIVE_LIMIT,
};
use crate::bounds::{BoundsError, BoundsReport, CircuitSummary, DelayMode, EnergyModel};
use crate::logic_sim::{simulate, SimConfig, SimError};
use crate::netlist::Circuit;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid sweep grid: {0}")]
    Grid(String),
    #[error("{0}")]
    Domain(String),
    #[error("unknown figure preset {0} (expected 2, 3, 4, 5 or 6)")]
    Figure(u8),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
}

pub type Result<T> = std::result::Result<T, ReportError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Epsilon,
    Delta,
    Sw0,
    K,
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "epsilon" => Ok(SweepParam::Epsilon),
            "delta" => Ok(SweepParam::Delta),
            "sw0" => Ok(SweepParam::Sw0),
            "k" => Ok(SweepParam::K),
            other => Err(format!(
                "unknown sweep parameter `{other}` (epsilon|delta|sw0|k)"
            )),
        }
    }
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParam::Epsilon => "epsilon",
            SweepParam::Delta => "delta",
            SweepParam::Sw0 => "sw0",
            SweepParam::K => "k",
        })
    }
}

impl SweepParam {
    fn check(self, v: f64) -> Result<()> {
        let ok = match self {
            SweepParam::Epsilon => (0.0..=0.5).contains(&v),
            SweepParam::Delta => (0.0..0.5).contains(&v),
            SweepParam::Sw0 => v > 0.0 && v < 1.0,
            SweepParam::K => v.is_finite() && v >= 1.0,
        };
        if ok {
            Ok(())
        } else {
            let domain = match self {
                SweepParam::Epsilon => "[0, 0.5]",
                SweepParam::Delta => "[0, 0.5)",
                SweepParam::Sw0 => "(0, 1)",
                SweepParam::K => "[1, inf)",
            };
            Err(ReportError::Domain(format!(
                "{self} = {v} outside {domain}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Grid {
            start,
            stop,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Self {
        Grid {
            start,
            stop,
            points,
            spacing: Spacing::Log,
        }
    }

    /// Grid points; the endpoints are reproduced exactly.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(ReportError::Grid(format!(
                "need at least 2 points, got {}",
                self.points
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(ReportError::Grid("grid bounds must be finite".into()));
        }
        let last = (self.points - 1) as f64;
        let values = match self.spacing {
            Spacing::Linear => (0..self.points)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / last)
                .collect::<Vec<_>>(),
            Spacing::Log => {
                if self.start <= 0.0 || self.stop <= 0.0 {
                    return Err(ReportError::Grid(
                        "log spacing needs positive bounds".into(),
                    ));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..self.points)
                    .map(|i| (a + (b - a) * i as f64 / last).exp())
                    .collect()
            }
        };
        let mut values = values;
        values[0] = self.start;
        values[self.points - 1] = self.stop;
        Ok(values)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::log(1e-4, 0.499, 50)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Curve label written to the `name` column.
    pub name: String,
    pub param: SweepParam,
    pub grid: Grid,
    /// Fixed inputs; the swept field is overwritten per grid point.
    pub summary: CircuitSummary,
    pub epsilon: f64,
    pub delta: f64,
    pub model: EnergyModel,
    pub mode: DelayMode,
}

/// Ten-input parity with `S0 = 21`, `sw0 = 0.5` and fanin `k`.
pub fn reference_summary(k: f64) -> CircuitSummary {
    CircuitSummary {
        s: 10,
        s0: 21,
        sw0: 0.5,
        k,
        n: 10,
        d0: None,
        m: 1,
    }
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            name: "sweep".into(),
            param: SweepParam::Epsilon,
            grid: Grid::default(),
            summary: reference_summary(2.0),
            epsilon: 0.01,
            delta: 0.01,
            model: EnergyModel::default(),
            mode: DelayMode::Figure,
        }
    }
}

impl SweepSpec {
    /// Grid values, each checked against the swept parameter's domain, and
    /// the fixed parameters checked at the first point.
    pub fn validate(&self) -> Result<Vec<f64>> {
        let values = self.grid.values()?;
        for &v in &values {
            self.param.check(v)?;
        }
        self.model.validate()?;
        let (summary, epsilon, delta) = self.point(values[0]);
        SweepParam::Epsilon.check(epsilon)?;
        SweepParam::Delta.check(delta)?;
        summary.validate()?;
        Ok(values)
    }

    fn point(&self, v: f64) -> (CircuitSummary, f64, f64) {
        let mut summary = self.summary;
        let (mut epsilon, mut delta) = (self.epsilon, self.delta);
        match self.param {
            SweepParam::Epsilon => epsilon = v,
            SweepParam::Delta => delta = v,
            SweepParam::Sw0 => summary.sw0 = v,
            SweepParam::K => summary.k = v,
        }
        (summary, epsilon, delta)
    }
}

/// One evaluated (summary, ε, δ) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub epsilon: f64,
    pub delta: f64,
    pub summary: CircuitSummary,
    pub report: BoundsReport,
    /// How `summary.s` was obtained, for measured circuits.
    pub sensitivity_mode: Option<SensitivityMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub name: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    /// Effective configuration echoed into both output formats.
    pub spec: serde_json::Value,
    pub rows: Vec<Row>,
    pub failures: Vec<Failure>,
}

impl Table {
    pub fn records(&self) -> Vec<Record> {
        self.rows.iter().map(Record::from_row).collect()
    }

    /// True when every row has an infeasible depth bound (and there is at
    /// least one row).
    pub fn infeasible_only(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.report.depth.is_infeasible())
    }
}

/// Evaluates every grid point of `spec`, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<Row>> {
    let values = spec.validate()?;
    values
        .par_iter()
        .map(|&v| {
            let (summary, epsilon, delta) = spec.point(v);
            let report = BoundsReport::evaluate(&summary, delta, epsilon, &spec.model, spec.mode)?;
            Ok(Row {
                name: spec.name.clone(),
                epsilon,
                delta,
                summary,
                report,
                sensitivity_mode: None,
            })
        })
        .collect()
}

/// Runs several sweeps and concatenates their rows into one table.
pub fn run_sweeps(specs: &[SweepSpec]) -> Result<Table> {
    let mut rows = Vec::new();
    for spec in specs {
        rows.extend(run_sweep(spec)?);
    }
    Ok(Table {
        spec: serde_json::to_value(specs)?,
        rows,
        failures: Vec::new(),
    })
}

fn fmt_label(v: f64) -> String {
    format!("{v}")
}

/// Curves for the five standard plots, one [`SweepSpec`] per curve.
///
/// * 2: noisy switching activity against `sw0` for several ε
/// * 3: redundancy against ε for fanin 2, 3, 4
/// * 4: leakage ratio against ε for `sw0` of 0.2, 0.5, 0.8
/// * 5: delay and energy×delay against ε for fanin 2, 3, 4
/// * 6: average power against ε for fanin 2, 3, 4
///
/// All use the ten-input parity reference (`s = 10`, `S0 = 21`,
/// `δ = 0.01`, `λ = 0.5`, `sw0 = 0.5`) in figure delay mode.
pub fn figure_preset(figure: u8) -> Result<Vec<SweepSpec>> {
    let base = SweepSpec::default();
    let by_fanin = |prefix: &str| -> Vec<SweepSpec> {
        [2.0, 3.0, 4.0]
            .into_iter()
            .map(|k| SweepSpec {
                name: format!("{prefix}_k{k}"),
                summary: reference_summary(k),
                ..base.clone()
            })
            .collect()
    };
    let specs = match figure {
        2 => [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5]
            .into_iter()
            .map(|eps| SweepSpec {
                name: format!("fig2_eps{}", fmt_label(eps)),
                param: SweepParam::Sw0,
                grid: Grid::linear(0.01, 0.99, 50),
                epsilon: eps,
                ..base.clone()
            })
            .collect(),
        3 => by_fanin("fig3"),
        4 => [0.2, 0.5, 0.8]
            .into_iter()
            .map(fig4_curve)
            .collect(),
        5 => by_fanin("fig5"),
        6 => by_fanin("fig6"),
        other => return Err(ReportError::Figure(other)),
    };
    Ok(specs)
}

/// One leakage-ratio curve at fixed `sw0`.
pub fn fig4_curve(sw0: f64) -> SweepSpec {
    let mut summary = reference_summary(2.0);
    summary.sw0 = sw0;
    SweepSpec {
        name: format!("fig4_sw0{}", fmt_label(sw0)),
        summary,
        ..SweepSpec::default()
    }
}

/// Settings shared by every circuit of a benchmark batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub epsilons: Vec<f64>,
    pub delta: f64,
    pub model: EnergyModel,
    /// Error-free simulation used to measure `sw0`; its epsilon is ignored.
    pub sim: SimConfig,
    pub mode: DelayMode,
    /// Inputs drawn when a circuit is too wide for exhaustive sensitivity.
    pub sensitivity_samples: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            epsilons: vec![0.001, 0.01, 0.1],
            delta: 0.01,
            model: EnergyModel::default(),
            sim: SimConfig::default(),
            mode: DelayMode::Analyze,
            sensitivity_samples: 10_000,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        for &eps in &self.epsilons {
            SweepParam::Epsilon.check(eps)?;
        }
        SweepParam::Delta.check(self.delta)?;
        self.model.validate()?;
        SimConfig {
            epsilon: 0.0,
            ..self.sim
        }
        .validate()?;
        if self.sensitivity_samples == 0 {
            return Err(SensitivityError::NoSamples.into());
        }
        Ok(())
    }
}

/// Measures the bound inputs of `c`: error-free activity, sensitivity
/// (exhaustive up to the enumeration limit, sampled beyond), and structure.
pub fn measure(c: &Circuit, cfg: &BenchConfig) -> Result<(CircuitSummary, SensitivityResult)> {
    let (_, activity) = simulate(c, &cfg.sim)?;
    let sens = if c.inputs().len() <= EXHAUSTIVE_LIMIT {
        sensitivity_exact(c)?
    } else {
        sensitivity_sampled(c, cfg.sensitivity_samples, cfg.sim.seed)?
    };
    let summary = summarize(c, &activity, &sens)?;
    Ok((summary, sens))
}

/// Bound rows for each circuit at each ε of `cfg`, circuit-major.
///
/// Configuration errors abort the batch; a circuit whose measurement fails
/// becomes a [`Failure`] and the batch continues.
pub fn run_bench(circuits: &[Circuit], cfg: &BenchConfig) -> Result<Table> {
    cfg.validate()?;
    let per_circuit: Vec<std::result::Result<Vec<Row>, Failure>> =
        circuits.par_iter().map(|c| bench_circuit(c, cfg)).collect();
    let mut table = Table {
        spec: serde_json::to_value(cfg)?,
        ..Table::default()
    };
    for result in per_circuit {
        match result {
            Ok(rows) => table.rows.extend(rows),
            Err(failure) => table.failures.push(failure),
        }
    }
    Ok(table)
}

fn bench_circuit(c: &Circuit, cfg: &BenchConfig) -> std::result::Result<Vec<Row>, Failure> {
    let fail = |e: ReportError| Failure {
        name: c.name().to_string(),
        error: e.to_string(),
    };
    let (summary, sens) = measure(c, cfg).map_err(fail)?;
    cfg.epsilons
        .iter()
        .map(|&epsilon| {
            let report = BoundsReport::evaluate(&summary, cfg.delta, epsilon, &cfg.model, cfg.mode)
                .map_err(|e| fail(e.into()))?;
            Ok(Row {
                name: c.name().to_string(),
                epsilon,
                delta: cfg.delta,
                summary,
                report,
                sensitivity_mode: Some(sens.mode),
            })
        })
        .collect()
}
