//! Two-mode Fock-space optics for single-photon beam-splitter experiments.
//!
//! A lossless splitter maps the input annihilation operators onto the output
//! ones as `a_r = R a_1 + T a_2`, `a_t = T a_1 + R a_2`. On states this acts
//! through the creation operators, `a_1† -> R a_r† + T a_t†` and
//! `a_2† -> T a_r† + R a_t†`, which is what [`apply_beam_splitter`] expands.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::{batch_rng, batches, DiscreteSampler};

/// Tolerance for invariants after internal unitary operations.
pub const INVARIANT_TOL: f64 = 1e-12;
/// Tolerance for user-supplied splitter coefficients.
pub const INPUT_TOL: f64 = 1e-9;
/// Default photon-number cutoff; single-photon experiments never need more.
pub const DEFAULT_CUTOFF: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("fock_optics: splitter is not lossless (|R|^2+|T|^2-1 = {norm_defect:.3e}, RT*+TR* = {phase_defect:.3e})")]
    LosslessnessViolation { norm_defect: f64, phase_defect: f64 },
    #[error("fock_optics: occupation ({n1},{n2}) exceeds photon cutoff {cutoff}")]
    CutoffExceeded { n1: u32, n2: u32, cutoff: u32 },
    #[error("fock_optics: photon cutoff must be at least 1")]
    InvalidCutoff,
    #[error("fock_optics: state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("fock_optics: invalid prism gap geometry: {0}")]
    InvalidGeometry(&'static str),
}

/// Complex reflection and transmission amplitudes of a lossless splitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterCoeffs {
    r: Complex64,
    t: Complex64,
}

impl BeamSplitterCoeffs {
    pub fn r(&self) -> Complex64 {
        self.r
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// Symmetric 50/50 splitter, `R = i/sqrt(2)`, `T = 1/sqrt(2)`.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            r: Complex64::new(0.0, h),
            t: Complex64::new(h, 0.0),
        }
    }

    /// Builds the coefficients for a given transmittance using the phase
    /// convention `T` real positive, `R = i|R|`.
    pub fn from_transmittance(transmittance: f64) -> Self {
        let tt = transmittance.clamp(0.0, 1.0);
        Self {
            r: Complex64::new(0.0, (1.0 - tt).sqrt()),
            t: Complex64::new(tt.sqrt(), 0.0),
        }
    }
}

fn defects(r: Complex64, t: Complex64) -> (f64, f64) {
    let norm = r.norm_sqr() + t.norm_sqr() - 1.0;
    let phase = (r * t.conj() + t * r.conj()).norm();
    (norm, phase)
}

/// Checks both losslessness conditions at [`INPUT_TOL`]; never renormalizes.
pub fn validate_coeffs(r: Complex64, t: Complex64) -> Result<BeamSplitterCoeffs, FockError> {
    let (norm_defect, phase_defect) = defects(r, t);
    if !(norm_defect.abs() <= INPUT_TOL) || !(phase_defect <= INPUT_TOL) {
        return Err(FockError::LosslessnessViolation {
            norm_defect,
            phase_defect,
        });
    }
    Ok(BeamSplitterCoeffs { r, t })
}

/// Occupation numbers `(n1, n2)` of the two modes.
pub type Occupation = (u32, u32);

/// Truncated two-mode Fock state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockState {
    amplitudes: BTreeMap<Occupation, Complex64>,
    cutoff: u32,
}

impl TwoModeFockState {
    pub fn new(cutoff: u32) -> Result<Self, FockError> {
        if cutoff < 1 {
            return Err(FockError::InvalidCutoff);
        }
        Ok(Self {
            amplitudes: BTreeMap::new(),
            cutoff,
        })
    }

    pub fn vacuum() -> Self {
        let mut s = Self::new(DEFAULT_CUTOFF).expect("default cutoff is valid");
        s.amplitudes.insert((0, 0), Complex64::new(1.0, 0.0));
        s
    }

    /// `|n1, n2>` with the default cutoff (raised if needed).
    pub fn basis(n1: u32, n2: u32) -> Self {
        let cutoff = DEFAULT_CUTOFF.max(n1 + n2);
        let mut s = Self::new(cutoff).expect("cutoff >= 1");
        s.amplitudes.insert((n1, n2), Complex64::new(1.0, 0.0));
        s
    }

    /// Single photon in the first input port, `|1,0>`.
    pub fn single_photon() -> Self {
        Self::basis(1, 0)
    }

    /// Builds a state from explicit amplitudes and checks normalization.
    pub fn from_amplitudes(
        cutoff: u32,
        amplitudes: impl IntoIterator<Item = (Occupation, Complex64)>,
    ) -> Result<Self, FockError> {
        let mut s = Self::new(cutoff)?;
        for (occ, amp) in amplitudes {
            s.set(occ, amp)?;
        }
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > INPUT_TOL {
            return Err(FockError::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn set(&mut self, (n1, n2): Occupation, amp: Complex64) -> Result<(), FockError> {
        if n1 + n2 > self.cutoff {
            return Err(FockError::CutoffExceeded {
                n1,
                n2,
                cutoff: self.cutoff,
            });
        }
        if amp == Complex64::new(0.0, 0.0) {
            self.amplitudes.remove(&(n1, n2));
        } else {
            self.amplitudes.insert((n1, n2), amp);
        }
        Ok(())
    }

    pub fn amplitude(&self, occ: Occupation) -> Complex64 {
        self.amplitudes.get(&occ).copied().unwrap_or_default()
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Occupation, Complex64)> + '_ {
        self.amplitudes.iter().map(|(&k, &v)| (k, v))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Applies the splitter to every basis component of `state`.
///
/// Photon number is conserved, so the output always fits the input cutoff.
pub fn apply_beam_splitter(state: &TwoModeFockState, bs: &BeamSplitterCoeffs) -> TwoModeFockState {
    let (r, t) = (bs.r, bs.t);
    let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (&(n1, n2), &amp) in &state.amplitudes {
        // (a1†)^n1 (a2†)^n2 / sqrt(n1! n2!) |0>
        let input_norm = (factorial(n1) * factorial(n2)).sqrt();
        for j in 0..=n1 {
            for k in 0..=n2 {
                let coeff = binomial(n1, j) * binomial(n2, k) * r.powu(j) * t.powu(n1 - j) * t.powu(k) * r.powu(n2 - k);
                let m = j + k;
                let l = n1 + n2 - m;
                let weight = (factorial(m) * factorial(l)).sqrt() / input_norm;
                *out.entry((m, l)).or_default() += amp * coeff * weight;
            }
        }
    }
    out.retain(|_, a| a.norm_sqr() > 0.0);
    TwoModeFockState {
        amplitudes: out,
        cutoff: state.cutoff,
    }
}

/// Amplitudes for a reflected count, a transmitted count, and a coincidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionAmplitudes {
    pub a_r: Complex64,
    pub a_t: Complex64,
    pub a_c: Complex64,
}

impl DetectionAmplitudes {
    pub fn probabilities(&self) -> (f64, f64, f64) {
        (self.a_r.norm_sqr(), self.a_t.norm_sqr(), self.a_c.norm_sqr())
    }
}

pub fn detection_amplitudes(state: &TwoModeFockState) -> DetectionAmplitudes {
    DetectionAmplitudes {
        a_r: state.amplitude((1, 0)),
        a_t: state.amplitude((0, 1)),
        a_c: state.amplitude((1, 1)),
    }
}

/// Click counts at the reflection and transmission detectors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionCounts {
    /// Shots where only the reflection detector fired.
    pub reflected: u64,
    /// Shots where only the transmission detector fired.
    pub transmitted: u64,
    /// Shots where both fired.
    pub coincidences: u64,
}

impl DetectionCounts {
    fn merge(self, o: Self) -> Self {
        Self {
            reflected: self.reflected + o.reflected,
            transmitted: self.transmitted + o.transmitted,
            coincidences: self.coincidences + o.coincidences,
        }
    }
}

/// Draws `shots` photon-number measurements from the Born distribution of
/// `state`. Outcomes with zero amplitude are never drawn, so a single-photon
/// state yields exactly zero coincidences.
pub fn sample_detections(state: &TwoModeFockState, shots: usize, seed: u64) -> DetectionCounts {
    let outcomes: Vec<Occupation> = state.amplitudes.keys().copied().collect();
    let weights: Vec<f64> = state.amplitudes.values().map(|a| a.norm_sqr()).collect();
    let Some(sampler) = DiscreteSampler::new(&weights) else {
        return DetectionCounts::default();
    };
    batches(shots)
        .into_par_iter()
        .map(|(k, n)| {
            let mut rng = batch_rng(seed, k);
            let mut c = DetectionCounts::default();
            for _ in 0..n {
                let (n1, n2) = outcomes[sampler.sample(&mut rng)];
                match (n1 > 0, n2 > 0) {
                    (true, true) => c.coincidences += 1,
                    (true, false) => c.reflected += 1,
                    (false, true) => c.transmitted += 1,
                    (false, false) => {}
                }
            }
            c
        })
        .reduce(DetectionCounts::default, DetectionCounts::merge)
}

/// Two right-angle prisms separated by an air gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapGeometry {
    pub gap: f64,
    pub wavelength: f64,
    pub refractive_index: f64,
    pub incidence_angle: f64,
}

impl GapGeometry {
    /// n = 1.5 glass at 45 degrees incidence.
    pub fn new(gap: f64, wavelength: f64) -> Self {
        Self {
            gap,
            wavelength,
            refractive_index: 1.5,
            incidence_angle: PI / 4.0,
        }
    }

    pub fn validate(&self) -> Result<(), FockError> {
        if !(self.gap >= 0.0) {
            return Err(FockError::InvalidGeometry("gap must be >= 0"));
        }
        if !(self.wavelength > 0.0) {
            return Err(FockError::InvalidGeometry("wavelength must be > 0"));
        }
        if !(self.refractive_index > 1.0) {
            return Err(FockError::InvalidGeometry("refractive index must be > 1"));
        }
        if !(self.incidence_angle > 0.0 && self.incidence_angle < PI / 2.0) {
            return Err(FockError::InvalidGeometry("incidence angle must lie in (0, pi/2)"));
        }
        let s = self.refractive_index * self.incidence_angle.sin();
        if !(s > 1.0) {
            return Err(FockError::InvalidGeometry(
                "incidence angle is below the critical angle",
            ));
        }
        Ok(())
    }

    /// Evanescent decay constant in the gap.
    pub fn decay_constant(&self) -> f64 {
        let s = self.refractive_index * self.incidence_angle.sin();
        2.0 * PI / self.wavelength * (s * s - 1.0).sqrt()
    }

    fn barrier_factor(&self) -> f64 {
        let n2 = self.refractive_index * self.refractive_index;
        let sin2 = self.incidence_angle.sin().powi(2);
        let cos2 = self.incidence_angle.cos().powi(2);
        (n2 - 1.0).powi(2) / (4.0 * n2 * cos2 * (n2 * sin2 - 1.0))
    }
}

/// Frustrated-total-internal-reflection splitter:
/// `|T|^2 = 1 / (1 + beta sinh^2(kappa g))`.
pub fn gap_transmission(geom: &GapGeometry) -> Result<BeamSplitterCoeffs, FockError> {
    geom.validate()?;
    let x = geom.decay_constant() * geom.gap;
    let sh = x.sinh();
    let transmittance = if sh.is_finite() {
        1.0 / (1.0 + geom.barrier_factor() * sh * sh)
    } else {
        0.0
    };
    Ok(BeamSplitterCoeffs::from_transmittance(transmittance))
}
