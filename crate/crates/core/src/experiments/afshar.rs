//! Two pinholes, a wire grid at the dark fringes, and a lens imaging the
//! pinholes.
//!
//! Fields are propagated on a zero-padded grid wide enough that nothing wraps
//! around the periodic FFT window; profiles are exported on the central
//! observation window only.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    csv, invalid, positions_csv, profile_csv, require_positive, ExperimentError, ScenarioResult, DEFAULT_SEED,
    DEFAULT_SHOTS,
};
use crate::duality::{distinguishability_trace, normalize_density, visibility, DualityReport, PathDistribution};
use crate::wave::{
    apply_lens, apply_mask, find_extrema, intensity, make_aperture_field, sample_photon_positions, total_flux,
    ApertureSpec, Grid, Propagator, ScalarField, ThinLens, WaveError, WireGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AfsharStage {
    /// Fringes at the screen plane.
    #[serde(rename = "1")]
    One,
    /// Lens images without a grid.
    #[serde(rename = "2")]
    Two,
    /// Wire grid at the measured dark fringes, then lens images.
    #[serde(rename = "3")]
    Three,
    /// Stage 3 with photon counting at the two images.
    #[serde(rename = "3a")]
    ThreeA,
}

impl AfsharStage {
    pub const ALL: [AfsharStage; 4] = [Self::One, Self::Two, Self::Three, Self::ThreeA];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Two => "2",
            Self::Three => "3",
            Self::ThreeA => "3a",
        }
    }
}

impl fmt::Display for AfsharStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown stage {0:?} (expected 1, 2, 3 or 3a)")]
pub struct AfsharStageParseError(pub String);

impl FromStr for AfsharStage {
    type Err = AfsharStageParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| AfsharStageParseError(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AfsharConfig {
    pub wavelength: f64,
    pub pinhole_width: f64,
    /// Centre-to-centre pinhole distance.
    pub pinhole_separation: f64,
    /// Pinholes to the fringe / wire plane.
    pub screen_distance: f64,
    /// Pinholes to the lens.
    pub lens_distance: f64,
    /// Lens to the image plane.
    pub image_distance: f64,
    pub lens_diameter: f64,
    /// Defaults to the value that images the pinhole plane onto the image
    /// plane.
    pub focal_length: Option<f64>,
    pub wire_width: f64,
    pub wire_count: usize,
    /// Width of the exported observation window.
    pub window_width: f64,
    /// Samples across the observation window (power of two).
    pub grid_points: usize,
    /// Samples of the padded propagation grid; chosen automatically when
    /// absent.
    pub padded_points: Option<usize>,
    pub shots: usize,
    pub seed: u64,
}

impl Default for AfsharConfig {
    fn default() -> Self {
        Self {
            wavelength: 650e-9,
            pinhole_width: 250e-6,
            pinhole_separation: 2000e-6,
            screen_distance: 4.0,
            lens_distance: 4.2,
            image_distance: 1.38,
            lens_diameter: 0.03,
            focal_length: None,
            wire_width: 100e-6,
            wire_count: 6,
            window_width: 40e-3,
            grid_points: 1 << 14,
            padded_points: None,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
        }
    }
}

impl AfsharConfig {
    pub fn dx(&self) -> f64 {
        self.window_width / self.grid_points as f64
    }

    /// Expected dark-fringe spacing `lambda L / a` at the screen.
    pub fn fringe_spacing(&self) -> f64 {
        self.wavelength * self.screen_distance / self.pinhole_separation
    }

    pub fn lens(&self) -> ThinLens {
        let mut lens = ThinLens::imaging(self.lens_distance, self.image_distance, self.lens_diameter);
        if let Some(f) = self.focal_length {
            lens.focal_length = f;
        }
        lens
    }

    /// Smallest power of two `n` with `z <= n dx^2 / lambda` for every
    /// propagation leg.
    pub fn resolved_padded_points(&self) -> usize {
        if let Some(n) = self.padded_points {
            return n;
        }
        let dx = self.dx();
        let z = self
            .screen_distance
            .max(self.lens_distance - self.screen_distance)
            .max(self.image_distance);
        let need = (self.wavelength * z / (dx * dx)).ceil() as usize;
        need.next_power_of_two().max(self.grid_points)
    }

    /// Copy with every derived default filled in.
    pub fn resolved(&self) -> Self {
        Self {
            focal_length: Some(self.lens().focal_length),
            padded_points: Some(self.resolved_padded_points()),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        require_positive("wavelength", self.wavelength)?;
        require_positive("pinhole_width", self.pinhole_width)?;
        require_positive("pinhole_separation", self.pinhole_separation)?;
        require_positive("screen_distance", self.screen_distance)?;
        require_positive("image_distance", self.image_distance)?;
        require_positive("lens_diameter", self.lens_diameter)?;
        require_positive("window_width", self.window_width)?;
        require_positive("wire_width", self.wire_width)?;
        if let Some(f) = self.focal_length {
            require_positive("focal_length", f)?;
        }
        if !(self.lens_distance > self.screen_distance) {
            return Err(invalid("lens_distance", "the lens must sit beyond the screen plane"));
        }
        if self.pinhole_separation <= self.pinhole_width {
            return Err(invalid("pinhole_separation", "pinholes overlap"));
        }
        if self.wire_count == 0 || !self.wire_count.is_multiple_of(2) {
            return Err(invalid("wire_count", "must be a positive even number"));
        }
        if !self.grid_points.is_power_of_two() || self.grid_points < 16 {
            return Err(invalid(
                "grid_points",
                format!("must be a power of two >= 16, got {}", self.grid_points),
            ));
        }
        let padded = self.resolved_padded_points();
        if !padded.is_power_of_two() || padded < self.grid_points {
            return Err(invalid("padded_points", "must be a power of two >= grid_points"));
        }
        if (padded as f64) * self.dx() < self.lens_diameter {
            return Err(invalid("padded_points", "propagation grid is narrower than the lens"));
        }
        if self.fringe_spacing() * (self.wire_count as f64 + 1.0) > self.window_width {
            return Err(invalid("window_width", "window does not hold the central fringes"));
        }
        Ok(())
    }
}

/// Both pinholes, or only the second one (the first closed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pinholes {
    Both,
    First,
    Second,
}

struct Bench {
    cfg: AfsharConfig,
    grid: Grid,
    prop: Propagator,
    lens: ThinLens,
}

/// Stage-1 fringe measurements.
struct Fringes {
    minima: Vec<f64>,
    visibility: f64,
    i_max: f64,
    i_min: f64,
}

impl Bench {
    fn new(cfg: &AfsharConfig) -> Result<Self, ExperimentError> {
        cfg.validate()?;
        let n = cfg.resolved_padded_points();
        let grid = Grid::centered(n, cfg.dx());
        Ok(Self {
            cfg: cfg.clone(),
            grid,
            prop: Propagator::new(n, cfg.dx(), cfg.wavelength),
            lens: cfg.lens(),
        })
    }

    fn centers(&self, which: Pinholes) -> Vec<f64> {
        let h = self.cfg.pinhole_separation / 2.0;
        match which {
            Pinholes::Both => vec![-h, h],
            Pinholes::First => vec![-h],
            Pinholes::Second => vec![h],
        }
    }

    fn aperture(&self, which: Pinholes) -> Result<ScalarField, WaveError> {
        make_aperture_field(
            &ApertureSpec::hard(self.centers(which), self.cfg.pinhole_width),
            self.grid,
            self.cfg.wavelength,
        )
    }

    fn at_screen(&self, which: Pinholes) -> Result<ScalarField, WaveError> {
        self.prop.propagate(&self.aperture(which)?, self.cfg.screen_distance)
    }

    fn image(&self, at_screen: &ScalarField, wires: Option<&WireGrid>) -> Result<ScalarField, WaveError> {
        let masked = match wires {
            Some(w) => apply_mask(at_screen, w)?,
            None => at_screen.clone(),
        };
        let at_lens = self
            .prop
            .propagate(&masked, self.cfg.lens_distance - self.cfg.screen_distance)?;
        self.prop
            .propagate(&apply_lens(&at_lens, &self.lens)?, self.cfg.image_distance)
    }

    fn window(&self, field: &ScalarField) -> Result<(Vec<f64>, Vec<f64>), WaveError> {
        let w = field.crop_centered(self.cfg.grid_points)?;
        Ok((w.coords(), intensity(&w)))
    }

    fn fringes(&self, at_screen: &ScalarField) -> Result<Fringes, ExperimentError> {
        let (x, i) = self.window(at_screen)?;
        let half = self.cfg.wire_count as f64 / 2.0 * self.cfg.fringe_spacing();
        let peak = i.iter().copied().fold(0.0, f64::max);
        let ext = match find_extrema(&i, self.cfg.dx(), x[0]) {
            Ok(e) => Some(e),
            Err(WaveError::NoExtrema) => None,
            Err(e) => return Err(e.into()),
        };
        let central = ext.as_ref().map(|e| e.within(0.0, half));
        let minima = ext
            .as_ref()
            .map(|e| e.nearest_minima(0.0, self.cfg.wire_count))
            .unwrap_or_default()
            .into_iter()
            .filter(|m| m.position.abs() <= half)
            .map(|m| m.position)
            .collect();
        // No dark fringes in the central region means no fringe contrast.
        let (i_max, i_min, v) = match central {
            Some(c) if c.i_min.is_some() => {
                let i_max = c.i_max.unwrap_or(peak);
                let i_min = c.i_min.unwrap_or(0.0);
                (i_max, i_min, visibility(i_max, i_min)?)
            }
            _ => (peak, peak, 0.0),
        };
        Ok(Fringes {
            minima,
            visibility: v,
            i_max,
            i_min,
        })
    }

    fn wires(&self, minima: &[f64]) -> Result<WireGrid, ExperimentError> {
        if minima.len() != self.cfg.wire_count {
            return Err(ExperimentError::FringeDetection {
                expected: self.cfg.wire_count,
                found: minima.len(),
            });
        }
        Ok(WireGrid {
            wire_centers: minima.to_vec(),
            wire_width: self.cfg.wire_width,
        })
    }

    /// Trace distance between the normalized image profiles of each pinhole
    /// alone.
    fn image_distinguishability(&self, wires: Option<&WireGrid>) -> Result<f64, ExperimentError> {
        let rho = |which| -> Result<Vec<f64>, ExperimentError> {
            let img = self.image(&self.at_screen(which)?, wires)?;
            Ok(normalize_density(&intensity(&img), self.cfg.dx()))
        };
        Ok(distinguishability_trace(
            &rho(Pinholes::First)?,
            &rho(Pinholes::Second)?,
            self.cfg.dx(),
        )?)
    }

    fn path_distribution(&self, which: Pinholes) -> Result<PathDistribution, ExperimentError> {
        let h = self.cfg.pinhole_separation / 2.0;
        let field = self.aperture(which)?;
        let i = intensity(&field);
        let (mut lower, mut upper) = (0.0, 0.0);
        for (k, v) in i.iter().enumerate() {
            let x = self.grid.coord(k);
            if (x + h).abs() < (x - h).abs() {
                lower += v;
            } else {
                upper += v;
            }
        }
        Ok(PathDistribution::from_weights(&[lower, upper])?)
    }
}

fn l1_distortion(reference: &[f64], other: &[f64]) -> f64 {
    let diff: f64 = reference.iter().zip(other).map(|(a, b)| (a - b).abs()).sum();
    diff / reference.iter().sum::<f64>()
}

/// Intensity centroids of the `x < 0` and `x >= 0` halves.
fn half_plane_centroids(x: &[f64], i: &[f64]) -> (f64, f64) {
    let (mut m0, mut w0, mut m1, mut w1) = (0.0, 0.0, 0.0, 0.0);
    for (x, v) in x.iter().zip(i) {
        if *x < 0.0 {
            m0 += x * v;
            w0 += v;
        } else {
            m1 += x * v;
            w1 += v;
        }
    }
    (m0 / w0, m1 / w1)
}

fn record_duality(result: &mut ScenarioResult, prefix: &str, report: &DualityReport, path: &PathDistribution) {
    let p = path.probabilities();
    result.metric(format!("{prefix}path_p1"), p[0]);
    result.metric(format!("{prefix}path_p2"), p[1]);
    result.metric(format!("{prefix}predictability"), report.p);
    result.metric(format!("{prefix}wz_information_nats"), report.h_nats);
    result.metric(format!("{prefix}duality_sum_pred"), report.duality_sum_pred);
    result.metric(format!("{prefix}slack_pred"), report.slack_pred);
    result.metric(
        format!("{prefix}violation_pred"),
        f64::from(u8::from(report.violation_pred)),
    );
    if let (Some(sum), Some(slack), Some(violation)) =
        (report.duality_sum_trace, report.slack_trace, report.violation_trace)
    {
        result.metric(format!("{prefix}duality_sum_trace"), sum);
        result.metric(format!("{prefix}slack_trace"), slack);
        result.metric(format!("{prefix}violation_trace"), f64::from(u8::from(violation)));
    }
}

pub fn run_afshar(stage: AfsharStage, config: &AfsharConfig) -> Result<ScenarioResult, ExperimentError> {
    let bench = Bench::new(config)?;
    let cfg = &bench.cfg;
    let mut result = ScenarioResult::new(format!("afshar{stage}"), &cfg.resolved());
    let spacing = cfg.fringe_spacing();
    result.metric("expected_spacing_m", spacing);
    result.metric("lens_focal_length_m", bench.lens.focal_length);
    result.metric("grid_dx_m", cfg.dx());
    result.metric("propagation_points", bench.grid.n as f64);

    let screen_two = bench.at_screen(Pinholes::Both)?;
    let fringes = bench.fringes(&screen_two)?;

    if stage != AfsharStage::Two {
        let (x, i) = bench.window(&screen_two)?;
        result.artifact("sigma1_profile.csv", profile_csv(&x, &i));
        result.artifact("fringe_minima.csv", positions_csv(&fringes.minima));
        result.metric("visibility", fringes.visibility);
        result.metric("fringe_i_max", fringes.i_max);
        result.metric("fringe_i_min", fringes.i_min);
        result.metric("minima_found", fringes.minima.len() as f64);
        let gaps: Vec<f64> = fringes.minima.windows(2).map(|w| w[1] - w[0]).collect();
        if !gaps.is_empty() {
            result.metric("fringe_spacing_m", gaps.iter().sum::<f64>() / gaps.len() as f64);
            result.metric(
                "max_spacing_error_m",
                gaps.iter().map(|g| (g - spacing).abs()).fold(0.0, f64::max),
            );
        }
        if !fringes.minima.is_empty() {
            let offset = fringes
                .minima
                .iter()
                .map(|m| (m - ((m / spacing - 0.5).round() + 0.5) * spacing).abs())
                .fold(0.0, f64::max);
            result.metric("max_minimum_offset_m", offset);
        }
    }

    if stage == AfsharStage::One {
        return result.finish();
    }

    let image_two = bench.image(&screen_two, None)?;
    let (xw, iw) = bench.window(&image_two)?;
    let (c_lo, c_hi) = half_plane_centroids(&xw, &iw);
    result.metric("image_flux", total_flux(&image_two));
    result.metric("image_separation_m", c_hi - c_lo);
    result.metric(
        "expected_image_separation_m",
        cfg.pinhole_separation * cfg.image_distance / cfg.lens_distance,
    );
    result.artifact(
        if stage == AfsharStage::Two {
            "image_profile.csv"
        } else {
            "image_nogrid.csv"
        },
        profile_csv(&xw, &iw),
    );

    if stage == AfsharStage::Two {
        return result.finish();
    }

    let wires = bench.wires(&fringes.minima)?;
    result.artifact("wires.csv", positions_csv(&wires.wire_centers));

    // two pinholes, grid in place
    let flux_screen = total_flux(&screen_two);
    result.metric(
        "mask_loss",
        1.0 - total_flux(&apply_mask(&screen_two, &wires)?) / flux_screen,
    );
    let image_two_grid = bench.image(&screen_two, Some(&wires))?;
    result.metric("image_flux_grid", total_flux(&image_two_grid));
    result.metric("flux_ratio", total_flux(&image_two_grid) / total_flux(&image_two));
    result.metric(
        "image_l1_distortion",
        l1_distortion(&intensity(&image_two), &intensity(&image_two_grid)),
    );
    let (_, iw_grid) = bench.window(&image_two_grid)?;
    result.artifact("image_grid.csv", profile_csv(&xw, &iw_grid));

    let d_trace = bench.image_distinguishability(None)?;
    result.metric("d_trace", d_trace);
    result.metric("d_trace_with_grid", bench.image_distinguishability(Some(&wires))?);
    let path = bench.path_distribution(Pinholes::Both)?;
    let report = DualityReport::new(fringes.visibility, &path, Some(d_trace))?;
    record_duality(&mut result, "", &report, &path);

    // control: first pinhole closed, same wires
    let screen_one = bench.at_screen(Pinholes::Second)?;
    let control_fringes = bench.fringes(&screen_one)?;
    let image_one = bench.image(&screen_one, None)?;
    let image_one_grid = bench.image(&screen_one, Some(&wires))?;
    result.metric(
        "control_mask_loss",
        1.0 - total_flux(&apply_mask(&screen_one, &wires)?) / total_flux(&screen_one),
    );
    result.metric(
        "control_flux_ratio",
        total_flux(&image_one_grid) / total_flux(&image_one),
    );
    result.metric(
        "control_image_l1_distortion",
        l1_distortion(&intensity(&image_one), &intensity(&image_one_grid)),
    );
    result.metric("control_visibility", control_fringes.visibility);
    result.metric("control_d_trace", d_trace);
    let control_path = bench.path_distribution(Pinholes::Second)?;
    let control_report = DualityReport::new(control_fringes.visibility, &control_path, Some(d_trace))?;
    record_duality(&mut result, "control_", &control_report, &control_path);
    let (_, i1) = bench.window(&image_one)?;
    let (_, i1g) = bench.window(&image_one_grid)?;
    result.artifact("control_image_nogrid.csv", profile_csv(&xw, &i1));
    result.artifact("control_image_grid.csv", profile_csv(&xw, &i1g));

    if stage == AfsharStage::ThreeA {
        let dx = cfg.dx();
        let mut rows = Vec::new();
        for (name, prefix, profile) in [("two_pinholes", "", &iw_grid), ("control", "control_", &i1g)] {
            let samples = sample_photon_positions(profile, dx, xw[0], cfg.shots, cfg.seed)?;
            let neg = samples.iter().filter(|x| **x < 0.0).count();
            let pos = samples.len() - neg;
            result.metric(format!("{prefix}count_negative"), neg as f64);
            result.metric(format!("{prefix}count_positive"), pos as f64);
            result.metric(
                format!("{prefix}fraction_negative"),
                neg as f64 / samples.len().max(1) as f64,
            );
            rows.push([name.to_string(), neg.to_string(), pos.to_string()]);
            result.artifact(format!("{prefix}photon_samples.csv"), positions_csv(&samples));
        }
        result.artifact(
            "detector_counts.csv",
            csv(["configuration", "count_negative", "count_positive"], rows),
        );
    }

    result.finish()
}

/// Duality report rebuilt from the metrics of a stage-3 or 3a result.
pub fn duality_summary(result: &ScenarioResult) -> Result<DualityReport, ExperimentError> {
    duality_summary_with_prefix(result, "")
}

/// As [`duality_summary`], for metrics stored under `prefix` (e.g.
/// `"control_"`).
pub fn duality_summary_with_prefix(result: &ScenarioResult, prefix: &str) -> Result<DualityReport, ExperimentError> {
    let get = |key: &str| {
        let k = format!("{prefix}{key}");
        result.get(&k).ok_or(ExperimentError::MissingData(k))
    };
    let v = get("visibility")?;
    let path = PathDistribution::new(vec![get("path_p1")?, get("path_p2")?])?;
    let d = get("d_trace")?;
    Ok(DualityReport::new(v, &path, Some(d))?)
}
