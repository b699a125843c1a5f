use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{csv, fmt_num, invalid, ExperimentError, ScenarioResult, DEFAULT_SEED, DEFAULT_SHOTS};
use crate::measurement::{
    evolve_impulsive, multi_pointer_overlap, packet_overlap, reverse_measurement, separation_time, tally_outcomes,
    weak_value, ImpulsiveRun, ObservableSpectrum, PointerPacket, WeakMeasurementSetup, DEFAULT_KAPPA,
};

/// Impulsive pointer measurement read out once the packets have separated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpulsiveConfig {
    pub eigenvalues: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub pointer_width: f64,
    pub coupling: f64,
    /// Separation threshold in pointer widths.
    pub kappa: f64,
    /// Largest number of pointer coordinates in the overlap table.
    pub max_coordinates: u32,
    pub shots: usize,
    pub seed: u64,
}

impl Default for ImpulsiveConfig {
    fn default() -> Self {
        Self {
            eigenvalues: vec![-1.0, 0.0, 1.0],
            probabilities: vec![1.0 / 3.0; 3],
            pointer_width: 1.0,
            coupling: 1.0,
            kappa: DEFAULT_KAPPA,
            max_coordinates: 20,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
        }
    }
}

pub fn run_impulsive(config: &ImpulsiveConfig) -> Result<ScenarioResult, ExperimentError> {
    if !(config.kappa >= DEFAULT_KAPPA) {
        return Err(invalid(
            "kappa",
            format!("outcomes are read only after separation, need kappa >= {DEFAULT_KAPPA}"),
        ));
    }
    let spectrum = ObservableSpectrum::from_probabilities(config.eigenvalues.clone(), &config.probabilities)?;
    let mut run = ImpulsiveRun {
        spectrum,
        pointer: PointerPacket::new(0.0, config.pointer_width),
        coupling: config.coupling,
        duration: 0.0,
    };
    let t = separation_time(&run, config.kappa)?;
    run.duration = t;
    let branches = evolve_impulsive(&run, t)?;
    let tally = tally_outcomes(&run, t, config.shots, config.seed)?;
    let freqs = tally.frequencies();
    let fidelity = reverse_measurement(&run, t)?;
    let k = branches.len();
    let mut overlaps = vec![vec![0.0; k]; k];
    for (j, row) in overlaps.iter_mut().enumerate() {
        for (l, o) in row.iter_mut().enumerate() {
            *o = packet_overlap(&run, j, l, t)?.norm();
        }
    }
    let multi: Vec<f64> = (1..=config.max_coordinates)
        .map(|d| multi_pointer_overlap(&run, 0, 1.min(k - 1), t, d).map(|o| o.norm()))
        .collect::<Result<_, _>>()?;

    let mut result = ScenarioResult::new("measure_impulsive", config);
    result.metric("separation_time", t);
    result.metric("reversal_fidelity", fidelity);
    result.metric("ambiguous", tally.ambiguous as f64);
    for (i, f) in freqs.iter().enumerate() {
        result.metric(format!("frequency_{i}"), *f);
    }
    if k > 1 {
        result.metric("adjacent_overlap", overlaps[0][1]);
    }

    let table: Vec<_> = branches
        .iter()
        .zip(&freqs)
        .map(|(b, f)| {
            json!({
                "q": b.eigenvalue,
                "probability": b.amplitude.norm_sqr(),
                "center": b.packet.center,
                "frequency": f,
            })
        })
        .collect();
    let report = json!({
        "branches": table,
        "overlap_matrix": overlaps,
        "separation_time": t,
        "reversal_fidelity": fidelity,
        "multi_coordinate_overlap": multi,
    });
    result.artifact(
        "report.json",
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
    );
    result.artifact(
        "branches.csv",
        csv(
            ["q", "probability", "center", "frequency"],
            branches.iter().zip(&freqs).map(|(b, f)| {
                [
                    fmt_num(b.eigenvalue),
                    fmt_num(b.amplitude.norm_sqr()),
                    fmt_num(b.packet.center),
                    fmt_num(*f),
                ]
            }),
        ),
    );
    result.finish()
}

/// Qubit weak value with `|i> = cos(alpha)|0> + sin(alpha)|1>`,
/// `|f> = cos(chi)|0> - sin(chi)|1>` and `A = diag(1, -1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeakConfig {
    pub alpha: f64,
    pub chi: f64,
}

impl Default for WeakConfig {
    fn default() -> Self {
        Self {
            alpha: FRAC_PI_4,
            chi: FRAC_PI_4 - 0.1,
        }
    }
}

pub fn run_weak(config: &WeakConfig) -> Result<ScenarioResult, ExperimentError> {
    let setup = WeakMeasurementSetup::qubit(config.alpha, config.chi);
    let w = weak_value(&setup)?;
    let expectation = setup.pre.dotc(&(&setup.operator * &setup.pre)).re;
    let mut result = ScenarioResult::new("measure_weak", config);
    result.metric("weak_value_re", w.re);
    result.metric("weak_value_im", w.im);
    result.metric("pre_expectation", expectation);
    result.metric("postselection_overlap", setup.post.dotc(&setup.pre).norm());
    result.finish()
}
