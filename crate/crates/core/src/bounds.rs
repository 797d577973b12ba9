// SPDX-License-Identifier: Apache-2.0

//! Closed-form lower bounds for circuits of ε-noisy gates.
//!
//! All logarithms are base 2. Every function here is pure.
//!
//! * switching activity through a symmetric channel: [`noisy_sw`]
//! * extra gates needed for (1−δ)-reliable computation: [`redundancy_lb`]
//! * switching / total energy ratios: [`energy_ratio_lb`], [`total_energy_ratio_lb`]
//! * leakage-to-switching ratio shift: [`leakage_ratio`]
//! * logic depth and delay: [`depth_lb`], [`delay_ratio_lb`], [`scaled_delay`]
//! * average power and energy×delay: [`power_ratio`], [`edp_ratio_lb`]
//!
//! Leakage energy is modelled per cycle as proportional to the idle
//! fraction `1 − sw` of each gate; it is not scaled by latency. The
//! technology leakage factor cancels in every ratio and does not appear.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("epsilon must lie in [0, 0.5], got {0}")]
    Epsilon(f64),
    #[error("delta must lie in [0, 0.5), got {0}")]
    Delta(f64),
    #[error("fanin k must be a finite value >= 1, got {0}")]
    Fanin(f64),
    #[error("switching activity sw0 = {value} outside {domain}")]
    SwitchingActivity { value: f64, domain: &'static str },
    #[error("leakage share must lie in [0, 1), got {0}")]
    LeakageShare(f64),
    #[error("need vdd > vt > 0, got vdd = {vdd}, vt = {vt}")]
    Voltage { vdd: f64, vt: f64 },
    #[error("alpha must be positive, got {0}")]
    Alpha(f64),
    #[error("invalid circuit summary: {0}")]
    Summary(String),
    #[error("analyze-mode delay needs the measured error-free depth d0")]
    MissingDepth,
}

pub type Result<T> = std::result::Result<T, BoundsError>;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..=0.5).contains(&epsilon) {
        Ok(())
    } else {
        Err(BoundsError::Epsilon(epsilon))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..0.5).contains(&delta) {
        Ok(())
    } else {
        Err(BoundsError::Delta(delta))
    }
}

fn check_fanin(k: f64) -> Result<()> {
    if k.is_finite() && k >= 1.0 {
        Ok(())
    } else {
        Err(BoundsError::Fanin(k))
    }
}

fn check_open_sw(sw0: f64) -> Result<()> {
    if sw0 > 0.0 && sw0 < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::SwitchingActivity {
            value: sw0,
            domain: "(0, 1)",
        })
    }
}

/// `x log2 x` with the `0 log 0 = 0` convention.
fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Quantities derived from the gate error ε and the output error budget δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub epsilon: f64,
    pub delta: f64,
    /// ω = (1 − √(1 − 2ε)) / 2.
    pub omega: f64,
    /// t = (ω³ + (1 − ω)³) / (ω(1 − ω)); infinite at ε = 0.
    pub t: f64,
    /// ξ = 1 − 2ε.
    pub xi: f64,
    /// Δ = 1 + δ log δ + (1 − δ) log(1 − δ), one minus the binary entropy of δ.
    pub capacity: f64,
}

impl ChannelParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        check_delta(delta)?;
        // 1 − √(1 − 2ε) rewritten as 2ε / (1 + √(1 − 2ε)) to avoid cancellation.
        let omega = epsilon / (1.0 + (1.0 - 2.0 * epsilon).sqrt());
        let t = if epsilon == 0.0 {
            f64::INFINITY
        } else {
            (omega.powi(3) + (1.0 - omega).powi(3)) / (omega * (1.0 - omega))
        };
        Ok(ChannelParams {
            epsilon,
            delta,
            omega,
            t,
            xi: 1.0 - 2.0 * epsilon,
            capacity: 1.0 + xlog2x(delta) + xlog2x(1.0 - delta),
        })
    }
}

/// Switching activity at the output of an ε-noisy device whose error-free
/// output switches with probability `sw_y`.
pub fn noisy_sw(sw_y: f64, epsilon: f64) -> f64 {
    let xi = 1.0 - 2.0 * epsilon;
    xi * xi * sw_y + 2.0 * epsilon * (1.0 - epsilon)
}

/// Minimum number of gates that must be added to an `s`-sensitive function
/// for it to be computed (1−δ)-reliably by ε-noisy gates of fanin `k`.
///
/// Clamped at zero when the bound is vacuous. Returns 0 at ε = 0 and
/// `f64::INFINITY` at ε = 0.5, where reliable computation is impossible.
pub fn redundancy_lb(s: usize, delta: f64, k: f64, epsilon: f64) -> Result<f64> {
    check_delta(delta)?;
    check_fanin(k)?;
    let params = ChannelParams::new(epsilon, delta)?;
    if epsilon == 0.0 || s == 0 {
        return Ok(0.0);
    }
    let s = s as f64;
    let numerator = s * s.log2() + 2.0 * s * (2.0 * (1.0 - 2.0 * delta)).log2();
    if numerator <= 0.0 {
        return Ok(0.0);
    }
    let log_t = params.t.log2();
    if log_t <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(numerator / (k * log_t))
}

/// The inputs every bound consumes, measured from a netlist or given by hand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitSummary {
    /// Sensitivity of the (multi-output) function.
    pub s: usize,
    /// Error-free size in gates.
    pub s0: usize,
    /// Average error-free switching activity per gate.
    pub sw0: f64,
    /// Average fanin.
    pub k: f64,
    /// Primary input count.
    pub n: usize,
    /// Error-free depth in gate levels, when known.
    pub d0: Option<usize>,
    /// Primary output count.
    pub m: usize,
}

impl CircuitSummary {
    /// A hand-written summary without a backing circuit (figure mode).
    pub fn manual(s: usize, s0: usize, k: f64, n: usize, sw0: f64) -> Result<Self> {
        let summary = CircuitSummary {
            s,
            s0,
            sw0,
            k,
            n,
            d0: None,
            m: 1,
        };
        summary.validate()?;
        Ok(summary)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s > self.n {
            return Err(BoundsError::Summary(format!(
                "sensitivity {} exceeds input count {}",
                self.s, self.n
            )));
        }
        if self.s0 == 0 {
            return Err(BoundsError::Summary("size S0 must be at least 1".into()));
        }
        check_fanin(self.k)?;
        if !(self.sw0 > 0.0 && self.sw0 <= 1.0) {
            return Err(BoundsError::SwitchingActivity {
                value: self.sw0,
                domain: "(0, 1]",
            });
        }
        Ok(())
    }
}

/// Technology side of the energy/delay model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// Share λ of the error-free total energy that is leakage.
    pub leakage_share: f64,
    pub vdd: f64,
    pub vt: f64,
    /// Velocity-saturation exponent of the alpha-power delay model.
    pub alpha: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel {
            leakage_share: 0.5,
            vdd: 1.0,
            vt: 0.3,
            alpha: 1.3,
        }
    }
}

impl EnergyModel {
    pub fn with_leakage_share(mut self, share: f64) -> Self {
        self.leakage_share = share;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.leakage_share) {
            return Err(BoundsError::LeakageShare(self.leakage_share));
        }
        if !(self.vt > 0.0 && self.vdd > self.vt) {
            return Err(BoundsError::Voltage {
                vdd: self.vdd,
                vt: self.vt,
            });
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(BoundsError::Alpha(self.alpha));
        }
        Ok(())
    }
}

/// `1 + redundancy_lb / S0`.
pub fn size_factor_lb(summary: &CircuitSummary, delta: f64, epsilon: f64) -> Result<f64> {
    summary.validate()?;
    Ok(1.0 + redundancy_lb(summary.s, delta, summary.k, epsilon)? / summary.s0 as f64)
}

/// `noisy_sw(sw0, ε) / sw0`.
pub fn sw_factor(sw0: f64, epsilon: f64) -> f64 {
    noisy_sw(sw0, epsilon) / sw0
}

/// `(1 − noisy_sw(sw0, ε)) / (1 − sw0)`: growth of the idle (leaking) fraction.
pub fn leak_factor(sw0: f64, epsilon: f64) -> f64 {
    (1.0 - noisy_sw(sw0, epsilon)) / (1.0 - sw0)
}

/// Lower bound on switching energy relative to the error-free circuit.
pub fn energy_ratio_lb(summary: &CircuitSummary, delta: f64, epsilon: f64) -> Result<f64> {
    Ok(size_factor_lb(summary, delta, epsilon)? * sw_factor(summary.sw0, epsilon))
}

/// Lower bound on switching plus leakage energy, where leakage is a share
/// `λ` of the error-free total.
pub fn total_energy_ratio_lb(
    summary: &CircuitSummary,
    delta: f64,
    epsilon: f64,
    model: &EnergyModel,
) -> Result<f64> {
    model.validate()?;
    check_open_sw(summary.sw0)?;
    let size = size_factor_lb(summary, delta, epsilon)?;
    let lambda = model.leakage_share;
    let mix = (1.0 - lambda) * sw_factor(summary.sw0, epsilon)
        + lambda * leak_factor(summary.sw0, epsilon);
    Ok(size * mix)
}

/// Leakage-to-switching energy ratio of the noisy circuit normalized by the
/// error-free one.
pub fn leakage_ratio(sw0: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_open_sw(sw0)?;
    let xi2 = (1.0 - 2.0 * epsilon).powi(2);
    let flip = 2.0 * epsilon * (1.0 - epsilon);
    Ok((xi2 + flip / (1.0 - sw0)) / (xi2 + flip / sw0))
}

/// Outcome of the logic-depth bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DepthBound {
    /// ξ² > 1/k: depth is at least this many levels (never negative).
    Bounded { levels: f64 },
    /// ξ² ≤ 1/k and n ≤ 1/Δ: reliable computation is not ruled out, but no
    /// depth bound is known.
    Unbounded { max_inputs: f64 },
    /// ξ² ≤ 1/k and n > 1/Δ: no circuit computes the function reliably.
    Infeasible { max_inputs: f64 },
}

impl DepthBound {
    pub fn levels(&self) -> Option<f64> {
        match *self {
            DepthBound::Bounded { levels } => Some(levels),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, DepthBound::Infeasible { .. })
    }
}

/// Minimum logic depth of an n-input function computed (1−δ)-reliably with
/// ε-noisy gates of fanin `k`.
pub fn depth_lb(n: usize, delta: f64, k: f64, epsilon: f64) -> Result<DepthBound> {
    check_fanin(k)?;
    let p = ChannelParams::new(epsilon, delta)?;
    let gain = k * p.xi * p.xi;
    if gain > 1.0 {
        let levels = (n as f64 * p.capacity).log2() / gain.log2();
        return Ok(DepthBound::Bounded {
            levels: levels.max(0.0),
        });
    }
    let max_inputs = 1.0 / p.capacity;
    if n as f64 > max_inputs {
        Ok(DepthBound::Infeasible { max_inputs })
    } else {
        Ok(DepthBound::Unbounded { max_inputs })
    }
}

/// How the normalized delay picks its error-free baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DelayMode {
    /// Baseline is the depth bound itself at ε = 0, giving
    /// `log k / log(kξ²)` (independent of n and δ).
    #[default]
    Figure,
    /// Baseline is the measured netlist depth d0; ratio clamped at 1.
    Analyze,
}

impl std::str::FromStr for DelayMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "figure" => Ok(DelayMode::Figure),
            "analyze" => Ok(DelayMode::Analyze),
            other => Err(format!("unknown delay mode `{other}` (figure|analyze)")),
        }
    }
}

impl std::fmt::Display for DelayMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DelayMode::Figure => "figure",
            DelayMode::Analyze => "analyze",
        })
    }
}

/// Normalized delay lower bound at fixed supply voltage; `None` when the
/// depth bound does not apply (ξ² ≤ 1/k).
pub fn delay_ratio_lb(
    summary: &CircuitSummary,
    delta: f64,
    epsilon: f64,
    mode: DelayMode,
) -> Result<Option<f64>> {
    let depth = depth_lb(summary.n, delta, summary.k, epsilon)?;
    let Some(levels) = depth.levels() else {
        return Ok(None);
    };
    match mode {
        DelayMode::Figure => {
            if epsilon == 0.0 {
                return Ok(Some(1.0));
            }
            let xi = 1.0 - 2.0 * epsilon;
            Ok(Some(summary.k.log2() / (summary.k * xi * xi).log2()))
        }
        DelayMode::Analyze => {
            let d0 = summary.d0.ok_or(BoundsError::MissingDepth)?;
            Ok(Some((levels / d0.max(1) as f64).max(1.0)))
        }
    }
}

/// Alpha-power latency model `depth · Vdd / (Vdd − Vt)^α` (unit constant).
pub fn scaled_delay(depth: f64, model: &EnergyModel) -> Result<f64> {
    model.validate()?;
    Ok(depth * model.vdd / (model.vdd - model.vt).powf(model.alpha))
}

/// Normalized average power: total energy ratio over delay ratio.
pub fn power_ratio(
    summary: &CircuitSummary,
    delta: f64,
    epsilon: f64,
    model: &EnergyModel,
    mode: DelayMode,
) -> Result<Option<f64>> {
    let energy = total_energy_ratio_lb(summary, delta, epsilon, model)?;
    Ok(delay_ratio_lb(summary, delta, epsilon, mode)?.map(|d| energy / d))
}

/// Normalized energy×delay lower bound.
pub fn edp_ratio_lb(
    summary: &CircuitSummary,
    delta: f64,
    epsilon: f64,
    model: &EnergyModel,
    mode: DelayMode,
) -> Result<Option<f64>> {
    let energy = total_energy_ratio_lb(summary, delta, epsilon, model)?;
    Ok(delay_ratio_lb(summary, delta, epsilon, mode)?.map(|d| energy * d))
}

/// Every bound for one (summary, ε, δ, model, delay mode) tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub channel: ChannelParams,
    pub redundancy_lb: f64,
    pub size_factor_lb: f64,
    pub sw_factor: f64,
    pub energy_ratio_lb: f64,
    pub leak_factor: f64,
    pub total_energy_ratio_lb: f64,
    pub leakage_ratio: f64,
    pub depth: DepthBound,
    pub delay_mode: DelayMode,
    pub delay_ratio_lb: Option<f64>,
    pub power_ratio: Option<f64>,
    pub edp_ratio_lb: Option<f64>,
}

impl BoundsReport {
    pub fn evaluate(
        summary: &CircuitSummary,
        delta: f64,
        epsilon: f64,
        model: &EnergyModel,
        mode: DelayMode,
    ) -> Result<Self> {
        let channel = ChannelParams::new(epsilon, delta)?;
        let redundancy = redundancy_lb(summary.s, delta, summary.k, epsilon)?;
        let total = total_energy_ratio_lb(summary, delta, epsilon, model)?;
        let delay = delay_ratio_lb(summary, delta, epsilon, mode)?;
        Ok(BoundsReport {
            channel,
            redundancy_lb: redundancy,
            size_factor_lb: size_factor_lb(summary, delta, epsilon)?,
            sw_factor: sw_factor(summary.sw0, epsilon),
            energy_ratio_lb: energy_ratio_lb(summary, delta, epsilon)?,
            leak_factor: leak_factor(summary.sw0, epsilon),
            total_energy_ratio_lb: total,
            leakage_ratio: leakage_ratio(summary.sw0, epsilon)?,
            depth: depth_lb(summary.n, delta, summary.k, epsilon)?,
            delay_mode: mode,
            delay_ratio_lb: delay,
            power_ratio: delay.map(|d| total / d),
            edp_ratio_lb: delay.map(|d| total * d),
        })
    }
}
