use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gha::setting_seed;
use super::{csv, fmt_num, invalid, ExperimentError, ScenarioResult, DEFAULT_SEED, DEFAULT_SHOTS};
use crate::fock::{detection_amplitudes, sample_detections, DetectionCounts, TwoModeFockState, DEFAULT_CUTOFF};

/// Single photons of linear polarization `angle` incident on a birefringent
/// crystal with ordinary and extraordinary output ports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BggpConfig {
    /// Polarization angle relative to the ordinary axis (rad), in `[0, pi)`.
    pub angle: f64,
    pub shots: usize,
    pub seed: u64,
}

impl Default for BggpConfig {
    fn default() -> Self {
        Self {
            angle: PI / 4.0,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
        }
    }
}

/// Output state `cos(angle)|1,0> + sin(angle)|0,1>` over (ordinary,
/// extraordinary).
fn crystal_output(angle: f64) -> Result<TwoModeFockState, ExperimentError> {
    Ok(TwoModeFockState::from_amplitudes(
        DEFAULT_CUTOFF,
        [
            ((1, 0), Complex64::new(angle.cos(), 0.0)),
            ((0, 1), Complex64::new(angle.sin(), 0.0)),
        ],
    )?)
}

fn simulate(angle: f64, shots: usize, seed: u64) -> Result<(f64, DetectionCounts), ExperimentError> {
    if !(0.0..PI).contains(&angle) {
        return Err(invalid("angle", format!("must lie in [0, pi), got {angle}")));
    }
    let state = crystal_output(angle)?;
    let (p_o, _, _) = detection_amplitudes(&state).probabilities();
    Ok((p_o, sample_detections(&state, shots, seed)))
}

const HEADER: [&str; 6] = [
    "angle_rad",
    "p_ordinary",
    "p_extraordinary",
    "n_ordinary",
    "n_extraordinary",
    "n_coincidence",
];

fn row(angle: f64, p_o: f64, c: &DetectionCounts) -> [String; 6] {
    [
        fmt_num(angle),
        fmt_num(p_o),
        fmt_num(1.0 - p_o),
        c.reflected.to_string(),
        c.transmitted.to_string(),
        c.coincidences.to_string(),
    ]
}

pub fn run_bggp(config: &BggpConfig) -> Result<ScenarioResult, ExperimentError> {
    let (p_o, c) = simulate(config.angle, config.shots, config.seed)?;
    let mut result = ScenarioResult::new("bggp", config);
    result.metric("p_ordinary", p_o);
    result.metric("n_ordinary", c.reflected as f64);
    result.metric("n_extraordinary", c.transmitted as f64);
    result.metric("n_coincidence", c.coincidences as f64);
    result.metric("freq_ordinary", c.reflected as f64 / config.shots.max(1) as f64);
    result.artifact("bggp_counts.csv", csv(HEADER, [row(config.angle, p_o, &c)]));
    result.finish()
}

/// Runs every angle with the shot count and seed of `base`.
pub fn run_bggp_sweep(base: &BggpConfig, angles: &[f64]) -> Result<ScenarioResult, ExperimentError> {
    let mut result = ScenarioResult::new(
        "bggp_sweep",
        &serde_json::json!({ "angles": angles, "shots": base.shots, "seed": base.seed }),
    );
    let mut rows = Vec::with_capacity(angles.len());
    let mut coincidences = 0u64;
    for (i, &angle) in angles.iter().enumerate() {
        let (p_o, c) = simulate(angle, base.shots, setting_seed(base.seed, i))?;
        coincidences += c.coincidences;
        rows.push(row(angle, p_o, &c));
    }
    result.metric("settings", angles.len() as f64);
    result.metric("n_coincidence", coincidences as f64);
    result.artifact("bggp_counts.csv", csv(HEADER, rows));
    result.finish()
}
