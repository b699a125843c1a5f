//! Scenario runners that chain the physics modules into complete experiments.
//!
//! Each runner takes a plain config struct (serde-friendly, with defaults for
//! every field) and returns a [`ScenarioResult`]: named scalar metrics plus
//! CSV artifacts held in memory until [`ScenarioResult::write`] is called.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bohm::BohmError;
use crate::duality::DualityError;
use crate::fock::FockError;
use crate::measurement::MeasurementError;
use crate::wave::WaveError;

mod afshar;
mod bggp;
mod bohm_run;
mod gha;
mod measure_run;

pub use afshar::{
    duality_summary, duality_summary_with_prefix, run_afshar, AfsharConfig, AfsharStage, AfsharStageParseError,
};
pub use bggp::{run_bggp, run_bggp_sweep, BggpConfig};
pub use bohm_run::{run_bohm, BohmConfig};
pub use gha::{run_gha, GhaConfig};
pub use measure_run::{run_impulsive, run_weak, ImpulsiveConfig, WeakConfig};

/// Default Monte Carlo shot count.
pub const DEFAULT_SHOTS: usize = 100_000;
/// Default RNG seed.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Bohm(#[from] BohmError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error("experiments: invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("experiments: expected {expected} dark fringes near the axis, found {found}")]
    FringeDetection { expected: usize, found: usize },
    #[error("experiments: metric {0} is not finite")]
    NonFiniteMetric(String),
    #[error("experiments: result lacks metric {0} needed for a duality summary")]
    MissingData(String),
    #[error("experiments: i/o error at {path}: {message}")]
    Io { path: PathBuf, message: String },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// A named text file produced by a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: String,
    /// Fully resolved configuration.
    pub params: Value,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
    /// Artifact paths, filled in by [`ScenarioResult::write`].
    pub files: Vec<PathBuf>,
}

impl ScenarioResult {
    pub fn new(scenario: impl Into<String>, params: &impl Serialize) -> Self {
        Self {
            scenario: scenario.into(),
            params: serde_json::to_value(params).unwrap_or(Value::Null),
            metrics: BTreeMap::new(),
            artifacts: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub fn artifact(&mut self, name: impl Into<String>, contents: String) {
        self.artifacts.push(Artifact {
            name: name.into(),
            contents,
        });
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn artifact_named(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }

    pub fn finish(self) -> Result<Self, ExperimentError> {
        if let Some((k, _)) = self.metrics.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ExperimentError::NonFiniteMetric(k.clone()));
        }
        Ok(self)
    }

    /// JSON manifest. The timestamp sits under `generated_at` and is the only
    /// field that differs between identical runs.
    pub fn manifest(&self) -> Value {
        let generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        json!({
            "scenario": self.scenario,
            "params": self.params,
            "metrics": self.metrics,
            "files": self.files,
            "generated_at": generated_at,
        })
    }

    /// Writes every artifact and `manifest.json` into `dir`, creating it if
    /// needed. Returns the manifest path.
    pub fn write(&mut self, dir: &Path) -> Result<PathBuf, ExperimentError> {
        let io = |path: &Path, e: std::io::Error| ExperimentError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        self.files.clear();
        for a in &self.artifacts {
            let path = dir.join(&a.name);
            fs::write(&path, &a.contents).map_err(|e| io(&path, e))?;
            self.files.push(path);
        }
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest()).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;
        Ok(path)
    }
}

/// Reads back the scenario name, params and metrics of a manifest.
pub fn load_manifest(path: &Path) -> Result<ScenarioResult, ExperimentError> {
    let io = |message: String| ExperimentError::Io {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| io(e.to_string()))?;
    let metrics = v
        .get("metrics")
        .and_then(Value::as_object)
        .ok_or_else(|| io("manifest has no metrics object".into()))?
        .iter()
        .filter_map(|(k, v)| v.as_f64().map(|x| (k.clone(), x)))
        .collect();
    Ok(ScenarioResult {
        scenario: v
            .get("scenario")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string(),
        params: v.get("params").cloned().unwrap_or(Value::Null),
        metrics,
        artifacts: Vec::new(),
        files: Vec::new(),
    })
}

/// Formats a float with 17 significant digits so it round-trips exactly.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row and one row per record.
pub fn csv<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// `x_m,intensity` profile.
pub fn profile_csv(x: &[f64], intensity: &[f64]) -> String {
    csv(
        ["x_m", "intensity"],
        x.iter().zip(intensity).map(|(x, i)| [fmt_num(*x), fmt_num(*i)]),
    )
}

/// Single-column `x_m` listing.
pub fn positions_csv(x: &[f64]) -> String {
    csv(["x_m"], x.iter().map(|x| [fmt_num(*x)]))
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<(), ExperimentError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {value}")))
    }
}
