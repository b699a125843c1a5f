//! Angular-spectrum propagation.
//!
//! The field is expanded in plane waves with the FFT, each component is
//! advanced by `exp(i kz z)` with `kz = 2 pi sqrt(1/lambda^2 - fx^2)`, and the
//! result is transformed back. The method is exact for the periodic,
//! band-limited problem on the grid. Physical (non-periodic) results need the
//! grid to be wide enough that no light wraps around, which holds while
//! `z <= n dx^2 / lambda`; beyond that a warning is logged.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{ScalarField, WaveError};

/// Reusable FFT plans for one grid size.
#[derive(Clone)]
pub struct Propagator {
    n: usize,
    dx: f64,
    wavelength: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("n", &self.n)
            .field("dx", &self.dx)
            .field("wavelength", &self.wavelength)
            .finish()
    }
}

/// Distance beyond which the periodic grid starts to wrap light around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasingRisk {
    pub distance: f64,
    pub limit: f64,
}

/// Returns the wrap-around risk for propagating `field` by `distance`, if any.
pub fn aliasing_risk(field: &ScalarField, distance: f64) -> Option<AliasingRisk> {
    let limit = field.len() as f64 * field.dx() * field.dx() / field.wavelength();
    (distance > limit).then_some(AliasingRisk { distance, limit })
}

impl Propagator {
    pub fn new(n: usize, dx: f64, wavelength: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            dx,
            wavelength,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn for_field(field: &ScalarField) -> Self {
        Self::new(field.len(), field.dx(), field.wavelength())
    }

    fn spatial_frequency(&self, k: usize) -> f64 {
        let n = self.n as isize;
        let k = k as isize;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 / (n as f64 * self.dx)
    }

    /// Free-space transfer function for `distance`, in FFT order.
    pub fn transfer(&self, distance: f64) -> Vec<Complex64> {
        let inv_lambda = 1.0 / self.wavelength;
        // Carrier phase reduced modulo 2 pi to keep precision at metre scales.
        let carrier = 2.0 * PI * (distance * inv_lambda).fract();
        (0..self.n)
            .map(|k| {
                let f = self.spatial_frequency(k);
                let arg = inv_lambda * inv_lambda - f * f;
                if arg >= 0.0 {
                    // sqrt(1/l^2 - f^2) - 1/l, written to avoid cancellation
                    let excess = -f * f / (arg.sqrt() + inv_lambda);
                    Complex64::from_polar(1.0, carrier + 2.0 * PI * distance * excess)
                } else {
                    Complex64::new((-2.0 * PI * distance * (-arg).sqrt()).exp(), 0.0)
                }
            })
            .collect()
    }

    pub fn propagate(&self, field: &ScalarField, distance: f64) -> Result<ScalarField, WaveError> {
        if field.len() != self.n || field.dx() != self.dx || field.wavelength() != self.wavelength {
            return Err(WaveError::GridMismatch);
        }
        if !(distance >= 0.0) {
            return Err(WaveError::NegativeDistance(distance));
        }
        if distance == 0.0 {
            return Ok(field.clone());
        }
        if let Some(risk) = aliasing_risk(field, distance) {
            log::warn!(
                "wave_field: propagating {:.4} m exceeds the wrap-free limit {:.4} m for this grid",
                risk.distance,
                risk.limit
            );
        }
        let mut buf = field.samples().to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (s, h) in buf.iter_mut().zip(self.transfer(distance)) {
            *s *= h * scale;
        }
        self.inverse.process(&mut buf);
        ScalarField::new(buf, field.dx(), field.origin(), field.wavelength())
    }
}

/// One-shot propagation; builds a fresh [`Propagator`].
pub fn propagate(field: &ScalarField, distance: f64) -> Result<ScalarField, WaveError> {
    Propagator::for_field(field).propagate(field, distance)
}
