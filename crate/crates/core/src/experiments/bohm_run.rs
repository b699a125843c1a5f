use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{csv, fmt_num, invalid, require_positive, ExperimentError, ScenarioResult, DEFAULT_SEED};
use crate::bohm::{
    equivariance_chi2, field_snapshot, integrate_trajectory, non_crossing_check, run_ensemble, AnalyticTwoSlitWave,
    TrajectoryOptions, ELECTRON_MASS, HBAR,
};

/// Causal trajectories behind two Gaussian slits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BohmConfig {
    pub slit_separation: f64,
    pub slit_width: f64,
    pub mass: f64,
    /// Probability of the slit at `+a/2`.
    pub p_upper: f64,
    /// Flight time; defaults to 40 spreading times.
    pub duration: Option<f64>,
    pub steps: usize,
    /// Trajectory export keeps every `record_every`-th step.
    pub record_every: usize,
    pub particles: usize,
    /// Position tolerance per step for step-doubling control (m).
    pub tolerance: f64,
    pub bins: usize,
    pub snapshot_points: usize,
    pub seed: u64,
}

impl Default for BohmConfig {
    fn default() -> Self {
        let w = AnalyticTwoSlitWave::default();
        Self {
            slit_separation: w.slit_separation,
            slit_width: w.slit_width,
            mass: ELECTRON_MASS,
            p_upper: 0.5,
            duration: None,
            steps: 1000,
            record_every: 20,
            particles: 2000,
            tolerance: 1e-9,
            bins: 50,
            snapshot_points: 2001,
            seed: DEFAULT_SEED,
        }
    }
}

impl BohmConfig {
    pub fn wave(&self) -> AnalyticTwoSlitWave {
        AnalyticTwoSlitWave {
            slit_separation: self.slit_separation,
            slit_width: self.slit_width,
            mass: self.mass,
            c1: Complex64::new(self.p_upper.sqrt(), 0.0),
            c2: Complex64::new((1.0 - self.p_upper).sqrt(), 0.0),
            hbar: HBAR,
            ..AnalyticTwoSlitWave::default()
        }
    }

    pub fn resolved_duration(&self) -> f64 {
        self.duration.unwrap_or_else(|| 40.0 * self.wave().spreading_time())
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if !(0.0..=1.0).contains(&self.p_upper) {
            return Err(invalid("p_upper", "must lie in [0, 1]"));
        }
        require_positive("duration", self.resolved_duration())?;
        require_positive("tolerance", self.tolerance)?;
        if self.steps == 0 || self.record_every == 0 || self.particles == 0 {
            return Err(invalid("steps", "steps, record_every and particles must be positive"));
        }
        if self.snapshot_points < 3 {
            return Err(invalid("snapshot_points", "need at least 3 points"));
        }
        self.wave().validate()?;
        Ok(())
    }
}

pub fn run_bohm(config: &BohmConfig) -> Result<ScenarioResult, ExperimentError> {
    config.validate()?;
    let wave = config.wave();
    let t1 = config.resolved_duration();
    let opts = TrajectoryOptions::adaptive(t1 / config.steps as f64, config.tolerance);
    let ensemble = run_ensemble(&wave, config.particles, config.seed, (0.0, t1), &opts)?;
    let crossing = non_crossing_check(&ensemble.trajectories)?;
    let finals: Vec<f64> = ensemble.trajectories.iter().map(|t| t.final_position()).collect();
    let chi2 = equivariance_chi2(&wave, &finals, t1, config.bins)?;
    let axis = integrate_trajectory(&wave, 0.0, (0.0, t1), &opts)?;
    let axis_dev = axis.positions.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut result = ScenarioResult::new(
        "bohm",
        &BohmConfig {
            duration: Some(t1),
            ..config.clone()
        },
    );
    result.metric("spreading_time_s", wave.spreading_time());
    result.metric("duration_s", t1);
    result.metric("particles", ensemble.trajectories.len() as f64);
    result.metric("aborted", ensemble.aborted.len() as f64);
    result.metric("chi2_statistic", chi2.statistic);
    result.metric("chi2_dof", chi2.dof as f64);
    result.metric("chi2_p_value", chi2.p_value);
    result.metric("order_violations", f64::from(u8::from(!crossing.ordered)));
    result.metric(
        "first_violation_step",
        crossing.first_violation.map_or(-1.0, |(k, _)| k as f64),
    );
    result.metric("axis_max_deviation_m", axis_dev);

    let rows = ensemble.trajectories.iter().enumerate().flat_map(|(id, tr)| {
        let last = tr.times.len() - 1;
        (0..=last)
            .filter(move |k| k % config.record_every == 0 || *k == last)
            .map(move |k| [fmt_num(tr.times[k]), fmt_num(tr.positions[k]), id.to_string()])
    });
    result.artifact("trajectories.csv", csv(["t_s", "x_m", "trajectory_id"], rows));

    let (lo, hi) = wave.support(t1, 4.0);
    let snap = field_snapshot(&wave, t1, lo, hi, config.snapshot_points);
    let rows = (0..snap.x.len()).map(|i| {
        [
            fmt_num(snap.x[i]),
            fmt_num(snap.r[i]),
            fmt_num(snap.s[i]),
            snap.q[i].map_or_else(|| "NaN".to_string(), fmt_num),
            fmt_num(snap.v[i]),
        ]
    });
    result.artifact("field.csv", csv(["x_m", "R", "S", "Q", "v"], rows));
    result.finish()
}
