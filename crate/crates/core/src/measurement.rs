//! Impulsive pointer measurements and weak values.
//!
//! With the free Hamiltonians dropped, the coupling `H_I = -a Q p_y` makes
//! `dPhi/dt = -a q dPhi/dy` on each eigen-branch, so the branch-`k` pointer
//! packet is rigidly translated to `y0 + a q_k t`. Everything here follows from
//! that exact translation and the Gaussian overlap
//! `<g(y - u)|g(y - w)> = exp(-(u - w)^2 / (8 sigma^2))`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::{collect_batched, DiscreteSampler};

const NORM_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-9;
/// Default packet-separation criterion in units of the pointer width.
pub const DEFAULT_KAPPA: f64 = 5.0;
/// Relative density difference below which a pointer reading is ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("measurement_model: branch amplitudes must satisfy sum |c_k|^2 = 1 (got {0})")]
    NotNormalized(f64),
    #[error("measurement_model: eigenvalues and amplitudes must have equal, nonzero length")]
    ShapeMismatch,
    #[error("measurement_model: eigenvalues must be distinct and finite")]
    DegenerateEigenvalues,
    #[error("measurement_model: pointer width must be positive")]
    InvalidPointer,
    #[error("measurement_model: time {t} s is outside [0, {duration}] s")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("measurement_model: branch index {0} out of range")]
    NoSuchBranch(usize),
    #[error("measurement_model: separation threshold must be positive")]
    InvalidThreshold,
    #[error("measurement_model: branches never separate (need two distinct eigenvalues and nonzero coupling)")]
    NeverSeparates,
    #[error("measurement_model: pointer packets are not yet separated at t = {t} s (need t >= {needed} s)")]
    NotSeparated { t: f64, needed: f64 },
    #[error("measurement_model: pointer reading y = {0} lies where two branches are equally likely")]
    AmbiguousRegion(f64),
    #[error("measurement_model: post-selected state is orthogonal to the pre-selected state")]
    OrthogonalPostSelection,
    #[error("measurement_model: states must be normalized vectors of the operator's dimension")]
    InvalidState,
    #[error("measurement_model: operator is not Hermitian")]
    NotHermitian,
}

/// Eigenvalues of the measured observable and the system's amplitude on each
/// eigenstate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSpectrum {
    eigenvalues: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

impl ObservableSpectrum {
    pub fn new(eigenvalues: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self, MeasurementError> {
        if eigenvalues.is_empty() || eigenvalues.len() != amplitudes.len() {
            return Err(MeasurementError::ShapeMismatch);
        }
        if eigenvalues.iter().any(|q| !q.is_finite()) {
            return Err(MeasurementError::DegenerateEigenvalues);
        }
        for (i, a) in eigenvalues.iter().enumerate() {
            if eigenvalues[i + 1..].contains(a) {
                return Err(MeasurementError::DegenerateEigenvalues);
            }
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(MeasurementError::NotNormalized(norm));
        }
        Ok(Self {
            eigenvalues,
            amplitudes,
        })
    }

    /// Real amplitudes `sqrt(p_k)` for the given probabilities.
    pub fn from_probabilities(eigenvalues: Vec<f64>, probabilities: &[f64]) -> Result<Self, MeasurementError> {
        let amps = probabilities
            .iter()
            .map(|p| Complex64::new(p.max(0.0).sqrt(), 0.0))
            .collect();
        Self::new(eigenvalues, amps)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Normalized Gaussian pointer wave packet
/// `(2 pi sigma^2)^(-1/4) exp(-(y - center)^2 / (4 sigma^2) + i phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerPacket {
    pub center: f64,
    pub width: f64,
    pub phase: f64,
}

impl PointerPacket {
    pub fn new(center: f64, width: f64) -> Self {
        Self {
            center,
            width,
            phase: 0.0,
        }
    }

    pub fn amplitude(&self, y: f64) -> Complex64 {
        let s = self.width;
        let d = y - self.center;
        let mag = (2.0 * std::f64::consts::PI * s * s).powf(-0.25) * (-(d * d) / (4.0 * s * s)).exp();
        Complex64::from_polar(mag, self.phase)
    }

    /// `<self|other>` for packets of equal width.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        let d = other.center - self.center;
        let mag = (-(d * d) / (8.0 * self.width * self.width)).exp();
        Complex64::from_polar(mag, other.phase - self.phase)
    }

    fn shifted(&self, by: f64) -> Self {
        Self {
            center: self.center + by,
            ..*self
        }
    }
}

/// System spectrum, initial pointer and the coupling `H_I = -a Q p_y` acting
/// for `duration`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulsiveRun {
    pub spectrum: ObservableSpectrum,
    pub pointer: PointerPacket,
    /// Pointer displacement per unit eigenvalue per second.
    pub coupling: f64,
    pub duration: f64,
}

impl ImpulsiveRun {
    pub fn validate(&self) -> Result<(), MeasurementError> {
        if !(self.pointer.width > 0.0) {
            return Err(MeasurementError::InvalidPointer);
        }
        if !(self.coupling * self.duration).is_finite() || !(self.duration >= 0.0) {
            return Err(MeasurementError::TimeOutOfRange {
                t: self.duration,
                duration: self.duration,
            });
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<(), MeasurementError> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(MeasurementError::TimeOutOfRange {
                t,
                duration: self.duration,
            });
        }
        Ok(())
    }

    fn check_branch(&self, k: usize) -> Result<(), MeasurementError> {
        if k >= self.spectrum.len() {
            return Err(MeasurementError::NoSuchBranch(k));
        }
        Ok(())
    }

    fn packet_at(&self, k: usize, t: f64) -> PointerPacket {
        self.pointer.shifted(self.coupling * self.spectrum.eigenvalues[k] * t)
    }
}

/// One term `c_k phi_k(x) g_k(y, t)` of the entangled system-pointer state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub eigenvalue: f64,
    pub amplitude: Complex64,
    pub packet: PointerPacket,
}

pub fn evolve_impulsive(run: &ImpulsiveRun, t: f64) -> Result<Vec<Branch>, MeasurementError> {
    run.validate()?;
    run.check_time(t)?;
    Ok((0..run.spectrum.len())
        .map(|k| Branch {
            eigenvalue: run.spectrum.eigenvalues[k],
            amplitude: run.spectrum.amplitudes[k],
            packet: run.packet_at(k, t),
        })
        .collect())
}

/// `sum |c_k|^2 <g_k|g_k>`; equals 1 for every `t`.
pub fn joint_norm(branches: &[Branch]) -> f64 {
    branches
        .iter()
        .map(|b| b.amplitude.norm_sqr() * b.packet.overlap(&b.packet).re)
        .sum()
}

/// `<g_j(t)|g_k(t)>`.
pub fn packet_overlap(run: &ImpulsiveRun, j: usize, k: usize, t: f64) -> Result<Complex64, MeasurementError> {
    run.validate()?;
    run.check_branch(j)?;
    run.check_branch(k)?;
    run.check_time(t)?;
    Ok(run.packet_at(j, t).overlap(&run.packet_at(k, t)))
}

/// Overlap between branches `j` and `k` when `d` independent pointer
/// coordinates each receive the same coupling.
pub fn multi_pointer_overlap(
    run: &ImpulsiveRun,
    j: usize,
    k: usize,
    t: f64,
    d: u32,
) -> Result<Complex64, MeasurementError> {
    let single = packet_overlap(run, j, k, t)?;
    Ok((0..d).fold(Complex64::new(1.0, 0.0), |acc, _| acc * single))
}

/// Smallest `t` at which every pair of adjacent pointer packets is at least
/// `kappa` widths apart.
pub fn separation_time(run: &ImpulsiveRun, kappa: f64) -> Result<f64, MeasurementError> {
    run.validate()?;
    if !(kappa > 0.0) {
        return Err(MeasurementError::InvalidThreshold);
    }
    let mut q = run.spectrum.eigenvalues.clone();
    q.sort_by(f64::total_cmp);
    let min_gap = q.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let speed = run.coupling.abs() * min_gap;
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(MeasurementError::NeverSeparates);
    }
    Ok(kappa * run.pointer.width / speed)
}

/// Branch whose term `|c_k g_k(y0, t)|^2` dominates at pointer reading `y0`.
pub fn select_outcome(run: &ImpulsiveRun, t: f64, y0: f64) -> Result<usize, MeasurementError> {
    run.check_time(t)?;
    if run.spectrum.len() > 1 {
        let needed = separation_time(run, DEFAULT_KAPPA)?;
        // relative slack for times computed as `needed` by a different route
        if t < needed * (1.0 - 1e-12) {
            return Err(MeasurementError::NotSeparated { t, needed });
        }
    }
    let densities: Vec<f64> = (0..run.spectrum.len())
        .map(|k| (run.spectrum.amplitudes[k] * run.packet_at(k, t).amplitude(y0)).norm_sqr())
        .collect();
    let mut order: Vec<usize> = (0..densities.len()).collect();
    order.sort_by(|&a, &b| densities[b].total_cmp(&densities[a]));
    let best = order[0];
    if let Some(&second) = order.get(1) {
        let (d1, d2) = (densities[best], densities[second]);
        if d1 - d2 <= AMBIGUITY_TOL * d1 {
            return Err(MeasurementError::AmbiguousRegion(y0));
        }
    }
    Ok(best)
}

/// Draws pointer readings from the marginal `sum |c_k|^2 |g_k(y, t)|^2`.
pub fn sample_pointer(run: &ImpulsiveRun, t: f64, samples: usize, seed: u64) -> Result<Vec<f64>, MeasurementError> {
    run.validate()?;
    run.check_time(t)?;
    let weights: Vec<f64> = run.spectrum.amplitudes.iter().map(|c| c.norm_sqr()).collect();
    let branch = DiscreteSampler::new(&weights).ok_or(MeasurementError::NotNormalized(0.0))?;
    let normal = Normal::new(0.0, run.pointer.width).map_err(|_| MeasurementError::InvalidPointer)?;
    Ok(collect_batched(samples, seed, |rng, n| {
        (0..n)
            .map(|_| {
                let k = branch.sample(rng);
                run.packet_at(k, t).center + normal.sample(rng)
            })
            .collect()
    }))
}

/// Outcome counts from sampled pointer readings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeTally {
    pub counts: Vec<u64>,
    pub ambiguous: u64,
}

impl OutcomeTally {
    pub fn frequencies(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        self.counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
    }
}

pub fn tally_outcomes(run: &ImpulsiveRun, t: f64, samples: usize, seed: u64) -> Result<OutcomeTally, MeasurementError> {
    let ys = sample_pointer(run, t, samples, seed)?;
    let mut tally = OutcomeTally {
        counts: vec![0; run.spectrum.len()],
        ambiguous: 0,
    };
    for y in ys {
        match select_outcome(run, t, y) {
            Ok(k) => tally.counts[k] += 1,
            Err(MeasurementError::AmbiguousRegion(_)) => tally.ambiguous += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(tally)
}

/// `|<Phi_initial|Phi_final>|^2` after the measurement coupling is followed by
/// further coupling stages `(coupling, duration)` acting on the same pointer.
pub fn reversal_fidelity(run: &ImpulsiveRun, t: f64, stages: &[(f64, f64)]) -> Result<f64, MeasurementError> {
    run.validate()?;
    run.check_time(t)?;
    let amp: Complex64 = (0..run.spectrum.len())
        .map(|k| {
            let q = run.spectrum.eigenvalues[k];
            let shift = stages
                .iter()
                .fold(q * (run.coupling * t), |acc, &(a, dt)| acc + q * (a * dt));
            run.spectrum.amplitudes[k].norm_sqr() * run.pointer.overlap(&run.pointer.shifted(shift))
        })
        .sum();
    Ok(amp.norm_sqr())
}

/// Undoes a single-coordinate measurement with a field of opposite sign and
/// twice the strength, followed by one identical to the first.
pub fn reverse_measurement(run: &ImpulsiveRun, t: f64) -> Result<f64, MeasurementError> {
    let a = run.coupling;
    reversal_fidelity(run, t, &[(-2.0 * a, t), (a, t)])
}

/// Pre-selected state, post-selected state and the observable.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakMeasurementSetup {
    pub pre: DVector<Complex64>,
    pub post: DVector<Complex64>,
    pub operator: DMatrix<Complex64>,
}

impl WeakMeasurementSetup {
    pub fn validate(&self) -> Result<(), MeasurementError> {
        let n = self.operator.nrows();
        if self.operator.ncols() != n || self.pre.len() != n || self.post.len() != n || n == 0 {
            return Err(MeasurementError::InvalidState);
        }
        for v in [&self.pre, &self.post] {
            if (v.norm() - 1.0).abs() > STATE_TOL {
                return Err(MeasurementError::InvalidState);
            }
        }
        if (&self.operator - self.operator.adjoint()).norm() > 1e-12 * self.operator.norm().max(1.0) {
            return Err(MeasurementError::NotHermitian);
        }
        Ok(())
    }

    /// Qubit setup with `|i> = cos(alpha)|0> + sin(alpha)|1>`,
    /// `|f> = cos(chi)|0> - sin(chi)|1>` and `A = diag(1, -1)`.
    pub fn qubit(alpha: f64, chi: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self {
            pre: DVector::from_vec(vec![c(alpha.cos()), c(alpha.sin())]),
            post: DVector::from_vec(vec![c(chi.cos()), c(-chi.sin())]),
            operator: DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-1.0)])),
        }
    }
}

/// `<f|A|i> / <f|i>`.
pub fn weak_value(setup: &WeakMeasurementSetup) -> Result<Complex64, MeasurementError> {
    setup.validate()?;
    let overlap = setup.post.dotc(&setup.pre);
    if overlap.norm() < 1e-12 {
        return Err(MeasurementError::OrthogonalPostSelection);
    }
    Ok(setup.post.dotc(&(&setup.operator * &setup.pre)) / overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn run(q: Vec<f64>, amps: Vec<Complex64>, coupling: f64) -> ImpulsiveRun {
        ImpulsiveRun {
            spectrum: ObservableSpectrum::new(q, amps).unwrap(),
            pointer: PointerPacket::new(0.0, 1.0),
            coupling,
            duration: 100.0,
        }
    }

    fn balanced() -> ImpulsiveRun {
        run(vec![-1.0, 1.0], vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)], 1.0)
    }

    #[test]
    fn spectrum_validation() {
        assert!(ObservableSpectrum::new(vec![1.0, 1.0], vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).is_err());
        assert!(ObservableSpectrum::new(vec![1.0], vec![c(0.5)]).is_err());
        assert!(ObservableSpectrum::new(vec![1.0, 2.0], vec![c(1.0)]).is_err());
    }

    #[test]
    fn packets_translate_with_eigenvalue() {
        let r = balanced();
        let at0 = evolve_impulsive(&r, 0.0).unwrap();
        assert!(at0.iter().all(|b| b.packet.center == 0.0));
        let at5 = evolve_impulsive(&r, 5.0).unwrap();
        assert_eq!(at5[0].packet.center, -5.0);
        assert_eq!(at5[1].packet.center, 5.0);
        assert!((joint_norm(&at5) - 1.0).abs() < 1e-12);
        assert!(evolve_impulsive(&r, 101.0).is_err());
    }

    #[test]
    fn spin_one_splits_three_ways() {
        let third = c((1.0f64 / 3.0).sqrt());
        let r = run(vec![-1.0, 0.0, 1.0], vec![third, third, third], 2.0);
        let b = evolve_impulsive(&r, 3.0).unwrap();
        let centers: Vec<f64> = b.iter().map(|b| b.packet.center).collect();
        assert_eq!(centers, vec![-6.0, 0.0, 6.0]);
    }

    #[test]
    fn overlap_examples() {
        let r = balanced();
        assert_eq!(packet_overlap(&r, 0, 1, 0.0).unwrap(), c(1.0));
        // separation 2 a t = 8 sigma
        let o = packet_overlap(&r, 0, 1, 4.0).unwrap();
        assert!((o.norm() - (-8.0f64).exp()).abs() < 1e-15);
        assert!((o.norm() - 3.35e-4).abs() < 1e-6);
        for t in [0.0, 1.0, 50.0] {
            assert_eq!(packet_overlap(&r, 1, 1, t).unwrap(), c(1.0));
        }
        assert_eq!(
            packet_overlap(&r, 0, 2, 1.0).unwrap_err(),
            MeasurementError::NoSuchBranch(2)
        );
    }

    #[test]
    fn overlap_decreases_monotonically() {
        let r = balanced();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let o = packet_overlap(&r, 0, 1, i as f64 * 0.05).unwrap().norm();
            assert!(o <= prev);
            prev = o;
        }
    }

    #[test]
    fn separation_time_examples() {
        let r = run(vec![0.0, 1.0], vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)], 1.0);
        assert_eq!(separation_time(&r, 5.0).unwrap(), 5.0);
        let faster = ImpulsiveRun {
            coupling: 3.0,
            ..r.clone()
        };
        assert!((separation_time(&faster, 5.0).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        let frozen = ImpulsiveRun {
            coupling: 0.0,
            ..r.clone()
        };
        assert_eq!(
            separation_time(&frozen, 5.0).unwrap_err(),
            MeasurementError::NeverSeparates
        );
        let single = run(vec![1.0], vec![c(1.0)], 1.0);
        assert_eq!(
            separation_time(&single, 5.0).unwrap_err(),
            MeasurementError::NeverSeparates
        );
        assert_eq!(
            separation_time(&r, 0.0).unwrap_err(),
            MeasurementError::InvalidThreshold
        );
    }

    #[test]
    fn outcome_selection() {
        let r = balanced();
        let t = separation_time(&r, 5.0).unwrap();
        assert_eq!(select_outcome(&r, t, -2.5).unwrap(), 0);
        assert_eq!(select_outcome(&r, t, 2.5).unwrap(), 1);
        assert_eq!(
            select_outcome(&r, t, 0.0).unwrap_err(),
            MeasurementError::AmbiguousRegion(0.0)
        );
        assert!(matches!(
            select_outcome(&r, 0.1, 1.0),
            Err(MeasurementError::NotSeparated { .. })
        ));

        let certain = run(vec![-1.0, 1.0], vec![c(1.0), c(0.0)], 1.0);
        let tally = tally_outcomes(&certain, 5.0, 2000, 3).unwrap();
        assert_eq!(tally.counts, vec![2000, 0]);
    }

    #[test]
    fn born_frequencies_balanced() {
        let r = balanced();
        let t = separation_time(&r, 5.0).unwrap();
        let f = tally_outcomes(&r, t, 10_000, 42).unwrap().frequencies();
        assert!((0.485..=0.515).contains(&f[0]), "{f:?}");
    }

    #[test]
    fn born_frequencies_unequal() {
        let r = ImpulsiveRun {
            spectrum: ObservableSpectrum::from_probabilities(vec![-1.0, 1.0], &[0.33, 0.67]).unwrap(),
            ..balanced()
        };
        let t = separation_time(&r, 5.0).unwrap();
        let f = tally_outcomes(&r, t, 10_000, 8).unwrap().frequencies();
        let sd = (0.33f64 * 0.67 / 10_000.0).sqrt();
        assert!((f[0] - 0.33).abs() < 4.0 * sd, "{f:?}");
    }

    #[test]
    fn reversal() {
        let r = run(vec![-1.0, 0.0, 1.0], vec![c(0.6), c(0.0), c(0.8)], 1.3);
        for t in [0.0, 2.0, 7.5] {
            assert!((reverse_measurement(&r, t).unwrap() - 1.0).abs() < 1e-10);
        }
        // Flipping the sign of both reversal fields doubles every shift.
        let b = balanced();
        let t = 3.0;
        let wrong = reversal_fidelity(&b, t, &[(2.0, t), (-1.0, t)]).unwrap();
        let shift = 2.0 * b.coupling * t;
        let o = (-(shift * shift) / 8.0f64).exp();
        assert!((wrong - o * o).abs() < 1e-15);
        assert!(wrong < 1.0);
    }

    #[test]
    fn many_pointer_coordinates_suppress_overlap() {
        let r = balanced();
        let single = packet_overlap(&r, 0, 1, 1.5).unwrap();
        for d in 0..=20u32 {
            let multi = multi_pointer_overlap(&r, 0, 1, 1.5, d).unwrap();
            let expected = single.powu(d);
            assert!((multi - expected).norm() <= 1e-9 * expected.norm());
        }
    }

    #[test]
    fn weak_value_examples() {
        let eig = WeakMeasurementSetup::qubit(0.0, 0.0);
        assert_eq!(weak_value(&eig).unwrap(), c(1.0));

        let w = weak_value(&WeakMeasurementSetup::qubit(FRAC_PI_4, 0.0)).unwrap();
        assert!((w - c(1.0)).norm() < 1e-15);

        let chi = FRAC_PI_4 - 0.1;
        let w = weak_value(&WeakMeasurementSetup::qubit(FRAC_PI_4, chi)).unwrap();
        let closed = (chi.cos() + chi.sin()) / (chi.cos() - chi.sin());
        assert!((w.re - closed).abs() < 1e-9);
        assert!((w.re - 1.0 / 0.1f64.tan()).abs() < 1e-9);
        assert!(w.im.abs() < 1e-12);

        let orth = WeakMeasurementSetup::qubit(FRAC_PI_4, FRAC_PI_4);
        assert_eq!(
            weak_value(&orth).unwrap_err(),
            MeasurementError::OrthogonalPostSelection
        );
    }

    #[test]
    fn weak_value_equals_expectation_without_postselection() {
        let s = WeakMeasurementSetup::qubit(0.3, 0.0);
        let same = WeakMeasurementSetup {
            post: s.pre.clone(),
            ..s
        };
        let expectation = same.pre.dotc(&(&same.operator * &same.pre));
        assert!((weak_value(&same).unwrap() - expectation).norm() < 1e-15);
    }

    #[test]
    fn weak_setup_validation() {
        let mut s = WeakMeasurementSetup::qubit(0.3, 0.2);
        s.operator[(0, 1)] = Complex64::new(0.0, 1.0);
        assert_eq!(weak_value(&s).unwrap_err(), MeasurementError::NotHermitian);
        let mut s = WeakMeasurementSetup::qubit(0.3, 0.2);
        s.pre *= c(2.0);
        assert_eq!(weak_value(&s).unwrap_err(), MeasurementError::InvalidState);
    }
}
