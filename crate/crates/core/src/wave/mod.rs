//! Scalar 1-D wave optics on a uniform grid.
//!
//! Fields live on power-of-two grids so the angular-spectrum propagator can
//! use a radix-2 FFT. Coordinates are SI metres throughout.

mod extrema;
mod photons;
mod propagate;

pub use extrema::{find_extrema, Extrema, Extremum, FringeSummary};
pub use photons::sample_photon_positions;
pub use propagate::{aliasing_risk, propagate, AliasingRisk, Propagator};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("wave_field: sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("wave_field: grid spacing and wavelength must be positive and finite")]
    InvalidGrid,
    #[error("wave_field: aperture at {center} m with width {width} m does not fit in the grid [{lo}, {hi}] m")]
    GridTooNarrow { center: f64, width: f64, lo: f64, hi: f64 },
    #[error("wave_field: openings or wires overlap")]
    Overlap,
    #[error("wave_field: widths must be positive")]
    NonPositiveWidth,
    #[error("wave_field: propagation distance must be >= 0 (got {0} m)")]
    NegativeDistance(f64),
    #[error("wave_field: fields live on different grids")]
    GridMismatch,
    #[error("wave_field: profile needs at least 3 samples")]
    ProfileTooShort,
    #[error("wave_field: profile has no interior extrema")]
    NoExtrema,
    #[error("wave_field: intensity profile carries no flux")]
    ZeroFlux,
    #[error("wave_field: intensity profile has a negative or non-finite sample")]
    InvalidProfile,
    #[error("wave_field: lens focal length and aperture must be positive")]
    InvalidLens,
}

/// Uniform sample grid: `x_i = origin + i * dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub dx: f64,
    pub origin: f64,
}

impl Grid {
    /// Grid of `n` samples with sample `n / 2` at the optical axis.
    pub fn centered(n: usize, dx: f64) -> Self {
        Self {
            n,
            dx,
            origin: -((n / 2) as f64) * dx,
        }
    }

    /// Centered grid of `n` samples spanning `width`.
    pub fn spanning(n: usize, width: f64) -> Self {
        Self::centered(n, width / n as f64)
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.dx
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.coord(i))
    }

    pub fn span(&self) -> (f64, f64) {
        (self.origin, self.coord(self.n.saturating_sub(1)))
    }

    fn validate(&self) -> Result<(), WaveError> {
        if !self.n.is_power_of_two() {
            return Err(WaveError::NotPowerOfTwo(self.n));
        }
        if !(self.dx > 0.0 && self.dx.is_finite() && self.origin.is_finite()) {
            return Err(WaveError::InvalidGrid);
        }
        Ok(())
    }
}

/// Sampled complex field with its grid and wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    samples: Vec<Complex64>,
    grid: Grid,
    wavelength: f64,
}

impl ScalarField {
    pub fn new(samples: Vec<Complex64>, dx: f64, origin: f64, wavelength: f64) -> Result<Self, WaveError> {
        let grid = Grid {
            n: samples.len(),
            dx,
            origin,
        };
        grid.validate()?;
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(WaveError::InvalidGrid);
        }
        Ok(Self {
            samples,
            grid,
            wavelength,
        })
    }

    pub fn zeros(grid: Grid, wavelength: f64) -> Result<Self, WaveError> {
        Self::new(vec![Complex64::default(); grid.n], grid.dx, grid.origin, wavelength)
    }

    /// Builds a field by evaluating `f` at every grid coordinate.
    pub fn from_fn(grid: Grid, wavelength: f64, f: impl Fn(f64) -> Complex64) -> Result<Self, WaveError> {
        let samples = grid.coords().map(f).collect();
        Self::new(samples, grid.dx, grid.origin, wavelength)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx
    }

    pub fn origin(&self) -> f64 {
        self.grid.origin
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn coords(&self) -> Vec<f64> {
        self.grid.coords().collect()
    }

    /// Central `n` samples (power of two, at most the current length).
    pub fn crop_centered(&self, n: usize) -> Result<Self, WaveError> {
        if n > self.len() {
            return Err(WaveError::GridMismatch);
        }
        let start = self.len() / 2 - n / 2;
        Self::new(
            self.samples[start..start + n].to_vec(),
            self.dx(),
            self.grid.coord(start),
            self.wavelength,
        )
    }

    /// Embeds the field in a larger zero-filled centered grid of `n` samples.
    pub fn pad_centered(&self, n: usize) -> Result<Self, WaveError> {
        if n < self.len() {
            return Err(WaveError::GridMismatch);
        }
        let start = n / 2 - self.len() / 2;
        let mut samples = vec![Complex64::default(); n];
        samples[start..start + self.len()].copy_from_slice(&self.samples);
        Self::new(
            samples,
            self.dx(),
            self.origin() - start as f64 * self.dx(),
            self.wavelength,
        )
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid && self.wavelength == other.wavelength
    }

    /// Coherent superposition of two fields on the same grid.
    pub fn superpose(&self, other: &Self) -> Result<Self, WaveError> {
        if !self.same_grid(other) {
            return Err(WaveError::GridMismatch);
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Self { samples, ..*self })
    }
}

/// Edge profile of an aperture opening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EdgeProfile {
    #[default]
    Hard,
    /// Raised-cosine taper of the given full length centred on each edge.
    Smoothed { edge: f64 },
}

/// Equal-width openings in an opaque screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApertureSpec {
    pub centers: Vec<f64>,
    pub width: f64,
    pub profile: EdgeProfile,
}

impl ApertureSpec {
    pub fn hard(centers: Vec<f64>, width: f64) -> Self {
        Self {
            centers,
            width,
            profile: EdgeProfile::Hard,
        }
    }

    fn half_extent(&self) -> f64 {
        match self.profile {
            EdgeProfile::Hard => self.width / 2.0,
            EdgeProfile::Smoothed { edge } => self.width / 2.0 + edge / 2.0,
        }
    }

    fn amplitude(&self, x: f64) -> f64 {
        let half = self.width / 2.0;
        self.centers
            .iter()
            .map(|&c| {
                let d = (x - c).abs();
                match self.profile {
                    EdgeProfile::Hard => f64::from(d < half),
                    EdgeProfile::Smoothed { edge } => {
                        let inner = half - edge / 2.0;
                        if d <= inner {
                            1.0
                        } else if d >= half + edge / 2.0 {
                            0.0
                        } else {
                            0.5 * (1.0 + (std::f64::consts::PI * (d - inner) / edge).cos())
                        }
                    }
                }
            })
            .sum()
    }
}

fn check_disjoint(centers: &[f64], half: f64) -> Result<(), WaveError> {
    let mut sorted = centers.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] < 2.0 * half) {
        return Err(WaveError::Overlap);
    }
    Ok(())
}

/// Unit-amplitude field inside the openings, zero outside.
pub fn make_aperture_field(aperture: &ApertureSpec, grid: Grid, wavelength: f64) -> Result<ScalarField, WaveError> {
    grid.validate()?;
    if !(aperture.width > 0.0) {
        return Err(WaveError::NonPositiveWidth);
    }
    if let EdgeProfile::Smoothed { edge } = aperture.profile {
        if !(edge > 0.0) || edge > aperture.width {
            return Err(WaveError::NonPositiveWidth);
        }
    }
    let half = aperture.half_extent();
    check_disjoint(&aperture.centers, half)?;
    let (lo, hi) = grid.span();
    for &c in &aperture.centers {
        if c - half < lo || c + half > hi {
            return Err(WaveError::GridTooNarrow {
                center: c,
                width: aperture.width,
                lo,
                hi,
            });
        }
    }
    ScalarField::from_fn(grid, wavelength, |x| Complex64::new(aperture.amplitude(x), 0.0))
}

/// Opaque wires in a transverse plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireGrid {
    pub wire_centers: Vec<f64>,
    pub wire_width: f64,
}

impl WireGrid {
    pub fn validate(&self) -> Result<(), WaveError> {
        if !(self.wire_width >= 0.0) {
            return Err(WaveError::NonPositiveWidth);
        }
        check_disjoint(&self.wire_centers, self.wire_width / 2.0)
    }

    pub fn blocks(&self, x: f64) -> bool {
        let half = self.wire_width / 2.0;
        self.wire_centers.iter().any(|&c| (x - c).abs() < half)
    }
}

/// Zeroes the field on the wire supports.
pub fn apply_mask(field: &ScalarField, grid: &WireGrid) -> Result<ScalarField, WaveError> {
    grid.validate()?;
    let mut out = field.clone();
    for (i, s) in out.samples.iter_mut().enumerate() {
        if grid.blocks(field.grid.coord(i)) {
            *s = Complex64::default();
        }
    }
    Ok(out)
}

/// Thin lens centred on the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinLens {
    pub focal_length: f64,
    pub aperture_diameter: f64,
}

impl ThinLens {
    /// Focal length that images a plane at `object_distance` onto a plane at
    /// `image_distance`.
    pub fn imaging(object_distance: f64, image_distance: f64, aperture_diameter: f64) -> Self {
        Self {
            focal_length: object_distance * image_distance / (object_distance + image_distance),
            aperture_diameter,
        }
    }
}

/// Quadratic phase `exp(-i pi x^2 / (lambda f))` inside the aperture, zero
/// outside.
pub fn apply_lens(field: &ScalarField, lens: &ThinLens) -> Result<ScalarField, WaveError> {
    if !(lens.focal_length > 0.0) || !(lens.aperture_diameter > 0.0) {
        return Err(WaveError::InvalidLens);
    }
    let half = lens.aperture_diameter / 2.0;
    let scale = std::f64::consts::PI / (field.wavelength * lens.focal_length);
    let mut out = field.clone();
    for (i, s) in out.samples.iter_mut().enumerate() {
        let x = field.grid.coord(i);
        if x.abs() > half {
            *s = Complex64::default();
        } else {
            *s *= Complex64::from_polar(1.0, -scale * x * x);
        }
    }
    Ok(out)
}

pub fn intensity(field: &ScalarField) -> Vec<f64> {
    field.samples.iter().map(|a| a.norm_sqr()).collect()
}

/// Sum of intensity times grid spacing.
pub fn total_flux(field: &ScalarField) -> f64 {
    field.samples.iter().map(|a| a.norm_sqr()).sum::<f64>() * field.dx()
}
