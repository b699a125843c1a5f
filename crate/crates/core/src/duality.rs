//! Wave-particle duality quantities.
//!
//! Two different "particle" parameters are carried side by side:
//!
//! * the predictability `P = |p1 - p2|` of the quantum path distribution, and
//! * the trace distance between the detection distributions produced by each
//!   path alone (how well an image separates the paths).
//!
//! For a coherent two-path superposition these disagree: the images can be
//! perfectly separable while the path distribution is even. [`DualityReport`]
//! reports the duality sum for each reading so they can be compared.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed above 1 before `D^2 + V^2` counts as a violation.
pub const DUALITY_TOL: f64 = 1e-9;
const DISTRIBUTION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualityError {
    #[error("duality_analysis: intensities must satisfy i_max >= i_min >= 0 and i_max > 0 (got {i_max}, {i_min})")]
    InvalidIntensities { i_max: f64, i_min: f64 },
    #[error("duality_analysis: probabilities must be in [0,1] and sum to 1")]
    InvalidDistribution,
    #[error("duality_analysis: predictability needs exactly 2 paths, got {0}")]
    WrongArity(usize),
    #[error("duality_analysis: profiles must share one non-empty grid")]
    GridMismatch,
    #[error("duality_analysis: {name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
}

/// Probabilities of the alternative paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDistribution(Vec<f64>);

impl PathDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, DualityError> {
        let sum: f64 = probabilities.iter().sum();
        if probabilities.is_empty()
            || probabilities.iter().any(|p| !(0.0..=1.0).contains(p))
            || (sum - 1.0).abs() > DISTRIBUTION_TOL
        {
            return Err(DualityError::InvalidDistribution);
        }
        Ok(Self(probabilities))
    }

    /// Normalizes nonnegative weights (e.g. per-path fluxes).
    pub fn from_weights(weights: &[f64]) -> Result<Self, DualityError> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(DualityError::InvalidDistribution);
        }
        Self::new(weights.iter().map(|w| w / sum).collect())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }
}

/// Fringe visibility `(i_max - i_min) / (i_max + i_min)`.
pub fn visibility(i_max: f64, i_min: f64) -> Result<f64, DualityError> {
    if !(i_max > 0.0 && i_min >= 0.0 && i_max >= i_min) {
        return Err(DualityError::InvalidIntensities { i_max, i_min });
    }
    Ok((i_max - i_min) / (i_max + i_min))
}

/// `|p1 - p2|` for a two-path distribution.
pub fn predictability(path: &PathDistribution) -> Result<f64, DualityError> {
    match path.0.as_slice() {
        [p1, p2] => Ok((p1 - p2).abs()),
        other => Err(DualityError::WrongArity(other.len())),
    }
}

/// Visibility of an ideal two-path pure superposition with path probabilities
/// `(p, 1 - p)`.
pub fn ideal_visibility(p: f64) -> f64 {
    2.0 * (p * (1.0 - p)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InfoUnit {
    #[default]
    Nats,
    Bits,
}

/// Shannon entropy `-sum p ln p` of the path distribution, in nats.
pub fn wz_information(path: &PathDistribution) -> f64 {
    // 0 - x rather than -x so a certain path gives +0.0
    0.0 - path.0.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

pub fn wz_information_in(path: &PathDistribution, unit: InfoUnit) -> f64 {
    match unit {
        InfoUnit::Nats => wz_information(path),
        InfoUnit::Bits => wz_information(path) / std::f64::consts::LN_2,
    }
}

/// Trace distance `1/2 sum |rho1 - rho2| dx` between two densities on one
/// grid. Each profile is expected to integrate to 1; the result is clamped to
/// `[0, 1]` against rounding.
pub fn distinguishability_trace(rho1: &[f64], rho2: &[f64], dx: f64) -> Result<f64, DualityError> {
    if rho1.len() != rho2.len() || rho1.is_empty() || !(dx > 0.0) {
        return Err(DualityError::GridMismatch);
    }
    let d = 0.5 * rho1.iter().zip(rho2).map(|(a, b)| (a - b).abs()).sum::<f64>() * dx;
    Ok(d.clamp(0.0, 1.0))
}

/// Rescales a nonnegative profile to unit integral.
pub fn normalize_density(profile: &[f64], dx: f64) -> Vec<f64> {
    let total: f64 = profile.iter().sum::<f64>() * dx;
    if total > 0.0 {
        profile.iter().map(|v| v / total).collect()
    } else {
        profile.to_vec()
    }
}

/// `D^2 + V^2` and whether it stays within 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityCheck {
    pub sum: f64,
    pub slack: f64,
    pub satisfied: bool,
}

pub fn duality_check(d: f64, v: f64) -> Result<DualityCheck, DualityError> {
    for (name, value) in [("D", d), ("V", v)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(DualityError::OutOfRange { name, value });
        }
    }
    let sum = d * d + v * v;
    Ok(DualityCheck {
        sum,
        slack: 1.0 - sum,
        satisfied: sum <= 1.0 + DUALITY_TOL,
    })
}

/// Flat summary of one run; serializes with snake_case keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// Fringe visibility.
    pub v: f64,
    /// Predictability of the quantum path distribution.
    pub p: f64,
    /// Trace distance between single-path detection profiles, when available.
    pub d_trace: Option<f64>,
    pub h_nats: f64,
    pub duality_sum_pred: f64,
    pub slack_pred: f64,
    pub violation_pred: bool,
    pub duality_sum_trace: Option<f64>,
    pub slack_trace: Option<f64>,
    pub violation_trace: Option<bool>,
}

impl DualityReport {
    pub fn new(v: f64, path: &PathDistribution, d_trace: Option<f64>) -> Result<Self, DualityError> {
        let p = predictability(path)?;
        let pred = duality_check(p, v)?;
        let trace = d_trace.map(|d| duality_check(d, v)).transpose()?;
        Ok(Self {
            v,
            p,
            d_trace,
            h_nats: wz_information(path),
            duality_sum_pred: pred.sum,
            slack_pred: pred.slack,
            violation_pred: !pred.satisfied,
            duality_sum_trace: trace.map(|c| c.sum),
            slack_trace: trace.map(|c| c.slack),
            violation_trace: trace.map(|c| !c.satisfied),
        })
    }
}
