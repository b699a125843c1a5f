//! Causal-interpretation dynamics for a two-slit wavefunction.
//!
//! The wave is written as `psi = R exp(iS/hbar)`. Particles move with the
//! guidance velocity `v = (dS/dx)/m = (hbar/m) Im(psi'/psi)` and the
//! quantum potential is `Q = -(hbar^2/2m) R''/R`.
//!
//! Each slit is modelled as a freely spreading Gaussian packet, so the wave
//! and its spatial derivative are known in closed form and trajectories carry
//! no PDE discretization error.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::sampling::batch_rng;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Relative amplitude below which a grid point counts as a node.
pub const NODE_THRESHOLD: f64 = 1e-8;
/// Phase jumps larger than this are treated as 2 pi wraps.
const UNWRAP_THRESHOLD: f64 = 0.9 * 2.0 * PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BohmError {
    #[error("bohmian_dynamics: invalid wave parameters: {0}")]
    InvalidWave(&'static str),
    #[error("bohmian_dynamics: time step and span must be positive (dt = {dt}, span = [{t0}, {t1}])")]
    InvalidTimeSpan { dt: f64, t0: f64, t1: f64 },
    #[error("bohmian_dynamics: particle at x = {x} m, t = {t} s is too close to a node of the wave")]
    NodeProximity { x: f64, t: f64 },
    #[error("bohmian_dynamics: step size control failed at t = {t} s")]
    StepControl { t: f64 },
    #[error("bohmian_dynamics: trajectories do not share a time grid")]
    TimeGridMismatch,
    #[error("bohmian_dynamics: need at least 2 bins and one sample for the chi-square test")]
    DegenerateHistogram,
}

/// Two Gaussian slits at `+-a/2` with complex amplitudes `c1` (at `+a/2`) and
/// `c2` (at `-a/2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticTwoSlitWave {
    pub slit_separation: f64,
    /// Standard deviation of `|psi|^2` for each slit at `t = 0`.
    pub slit_width: f64,
    pub mass: f64,
    /// Longitudinal speed; maps time of flight to distance from the slits.
    pub forward_speed: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub hbar: f64,
}

impl Default for AnalyticTwoSlitWave {
    /// Electron, 10 um slits 100 um apart, equal amplitudes.
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            slit_separation: 100e-6,
            slit_width: 10e-6,
            mass: ELECTRON_MASS,
            forward_speed: 1.0e6,
            c1: Complex64::new(h, 0.0),
            c2: Complex64::new(h, 0.0),
            hbar: HBAR,
        }
    }
}

impl AnalyticTwoSlitWave {
    pub fn validate(&self) -> Result<(), BohmError> {
        if !(self.slit_width > 0.0) {
            return Err(BohmError::InvalidWave("slit width must be > 0"));
        }
        if !(self.mass > 0.0) || !(self.hbar > 0.0) {
            return Err(BohmError::InvalidWave("mass and hbar must be > 0"));
        }
        if !(self.slit_separation >= 0.0) {
            return Err(BohmError::InvalidWave("slit separation must be >= 0"));
        }
        if ((self.c1.norm_sqr() + self.c2.norm_sqr()) - 1.0).abs() > 1e-12 {
            return Err(BohmError::InvalidWave("|c1|^2 + |c2|^2 must equal 1"));
        }
        Ok(())
    }

    /// Time for one packet's width to grow by a factor sqrt(2).
    pub fn spreading_time(&self) -> f64 {
        2.0 * self.mass * self.slit_width * self.slit_width / self.hbar
    }

    /// Width of one packet's density at time `t`.
    pub fn packet_width(&self, t: f64) -> f64 {
        self.slit_width * (1.0 + (t / self.spreading_time()).powi(2)).sqrt()
    }

    /// Overlap `<g_+|g_->` of the two unit packets; constant in time.
    fn packet_overlap(&self) -> f64 {
        let a = self.slit_separation;
        let s = self.slit_width;
        (-(a * a) / (8.0 * s * s)).exp()
    }

    fn normalization(&self) -> f64 {
        let cross = 2.0 * (self.c1.conj() * self.c2).re * self.packet_overlap();
        1.0 / (1.0 + cross).sqrt()
    }

    /// Unit Gaussian packet centred at 0 and its x-derivative.
    fn packet(&self, x: f64, t: f64) -> (Complex64, Complex64) {
        let s0 = self.slit_width;
        let st = Complex64::new(s0, self.hbar * t / (2.0 * self.mass * s0));
        let prefactor = (2.0 * PI * s0 * s0).powf(-0.25) * (Complex64::new(s0, 0.0) / st).sqrt();
        let g = prefactor * (-(x * x) / (4.0 * s0 * st)).exp();
        let dg = g * (-x / (2.0 * s0 * st));
        (g, dg)
    }

    /// `psi(x, t)` and `d psi/dx`.
    pub fn evaluate_with_derivative(&self, x: f64, t: f64) -> (Complex64, Complex64) {
        let half = self.slit_separation / 2.0;
        let (g1, d1) = self.packet(x - half, t);
        let (g2, d2) = self.packet(x + half, t);
        let n = self.normalization();
        ((self.c1 * g1 + self.c2 * g2) * n, (self.c1 * d1 + self.c2 * d2) * n)
    }

    pub fn density(&self, x: f64, t: f64) -> f64 {
        evaluate_wave(self, x, t).norm_sqr()
    }

    /// Upper bound on `|psi(., t)|`.
    pub fn amplitude_scale(&self, t: f64) -> f64 {
        let peak = (2.0 * PI * self.packet_width(t).powi(2)).powf(-0.25);
        (self.c1.norm() + self.c2.norm()) * peak * self.normalization()
    }

    /// Guidance velocity `(hbar/m) Im(psi'/psi)`; `None` near a node.
    pub fn velocity(&self, x: f64, t: f64) -> Option<f64> {
        let (psi, dpsi) = self.evaluate_with_derivative(x, t);
        if psi.norm() < 1e-12 * self.amplitude_scale(t) {
            return None;
        }
        Some(self.hbar / self.mass * (dpsi / psi).im)
    }

    /// Interval holding essentially all of `|psi(., t)|^2`.
    pub fn support(&self, t: f64, widths: f64) -> (f64, f64) {
        let reach = self.slit_separation / 2.0 + widths * self.packet_width(t);
        (-reach, reach)
    }
}

pub fn evaluate_wave(wave: &AnalyticTwoSlitWave, x: f64, t: f64) -> Complex64 {
    wave.evaluate_with_derivative(x, t).0
}

/// Amplitude and phase fields of a sampled wavefunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSFields {
    pub r: Vec<f64>,
    /// `hbar` times the unwrapped phase.
    pub s: Vec<f64>,
    /// Indices where `psi` is exactly zero and the phase is undefined.
    pub nodes: Vec<usize>,
}

/// Polar decomposition with sequential phase unwrapping. At an exact zero the
/// previous phase is carried forward and the index is reported in `nodes`.
pub fn rs_decompose(psi: &[Complex64], hbar: f64) -> RSFields {
    let mut r = Vec::with_capacity(psi.len());
    let mut s = Vec::with_capacity(psi.len());
    let mut nodes = Vec::new();
    let mut last_raw: Option<f64> = None;
    let mut offset = 0.0;
    let mut current = 0.0;
    for (i, z) in psi.iter().enumerate() {
        r.push(z.norm());
        if z.norm_sqr() == 0.0 {
            nodes.push(i);
            s.push(hbar * current);
            continue;
        }
        let raw = z.arg();
        if let Some(prev) = last_raw {
            let jump = raw - prev;
            if jump.abs() > UNWRAP_THRESHOLD {
                offset -= 2.0 * PI * (jump / (2.0 * PI)).round();
            }
        }
        last_raw = Some(raw);
        current = raw + offset;
        s.push(hbar * current);
    }
    RSFields { r, s, nodes }
}

/// `Q = -(hbar^2/2m) R''/R` by central differences. Endpoints and points where
/// `R <= NODE_THRESHOLD * max(R)` are `None`.
pub fn quantum_potential(r: &[f64], dx: f64, mass: f64) -> Vec<Option<f64>> {
    quantum_potential_with(r, dx, mass, HBAR)
}

pub fn quantum_potential_with(r: &[f64], dx: f64, mass: f64, hbar: f64) -> Vec<Option<f64>> {
    let n = r.len();
    let floor = NODE_THRESHOLD * r.iter().copied().fold(0.0, f64::max);
    let k = -hbar * hbar / (2.0 * mass);
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n || !(r[i] > floor) {
                return None;
            }
            let lap = (r[i - 1] - 2.0 * r[i] + r[i + 1]) / (dx * dx);
            Some(k * lap / r[i])
        })
        .collect()
}

/// `v = (dS/dx)/m`; central differences inside, one-sided at the ends.
pub fn velocity_field(s: &[f64], dx: f64, mass: f64) -> Vec<f64> {
    let n = s.len();
    (0..n)
        .map(|i| {
            let grad = match (i, n) {
                (_, 0 | 1) => 0.0,
                (0, _) => (s[1] - s[0]) / dx,
                (i, n) if i + 1 == n => (s[i] - s[i - 1]) / dx,
                (i, _) => (s[i + 1] - s[i - 1]) / (2.0 * dx),
            };
            grad / mass
        })
        .collect()
}

/// One particle path on a uniform output time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub x0: f64,
}

impl Trajectory {
    pub fn final_position(&self) -> f64 {
        *self.positions.last().expect("trajectory has at least its start")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    /// Output (and base integration) step.
    pub dt: f64,
    /// Step-doubling error control: steps whose full-step and two-half-step
    /// results differ by more than `tolerance` are halved recursively.
    pub adaptive: bool,
    /// Absolute position tolerance per output step, in metres.
    pub tolerance: f64,
    pub max_halvings: u32,
}

impl TrajectoryOptions {
    pub fn fixed(dt: f64) -> Self {
        Self {
            dt,
            adaptive: false,
            tolerance: 0.0,
            max_halvings: 0,
        }
    }

    pub fn adaptive(dt: f64, tolerance: f64) -> Self {
        Self {
            dt,
            adaptive: true,
            tolerance,
            max_halvings: 24,
        }
    }
}

fn guided_velocity(wave: &AnalyticTwoSlitWave, x: f64, t: f64) -> Result<f64, BohmError> {
    wave.velocity(x, t).ok_or(BohmError::NodeProximity { x, t })
}

fn rk4_step(wave: &AnalyticTwoSlitWave, x: f64, t: f64, h: f64) -> Result<f64, BohmError> {
    let k1 = guided_velocity(wave, x, t)?;
    let k2 = guided_velocity(wave, x + 0.5 * h * k1, t + 0.5 * h)?;
    let k3 = guided_velocity(wave, x + 0.5 * h * k2, t + 0.5 * h)?;
    let k4 = guided_velocity(wave, x + h * k3, t + h)?;
    Ok(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

fn controlled_step(
    wave: &AnalyticTwoSlitWave,
    x: f64,
    t: f64,
    h: f64,
    opts: &TrajectoryOptions,
    depth: u32,
) -> Result<f64, BohmError> {
    let full = rk4_step(wave, x, t, h)?;
    if !opts.adaptive {
        return Ok(full);
    }
    let mid = rk4_step(wave, x, t, 0.5 * h)?;
    let two_halves = rk4_step(wave, mid, t + 0.5 * h, 0.5 * h)?;
    let scaled_tol = opts.tolerance * 0.5f64.powi(depth as i32);
    if (two_halves - full).abs() <= scaled_tol {
        return Ok(two_halves);
    }
    if depth >= opts.max_halvings {
        return Err(BohmError::StepControl { t });
    }
    let mid = controlled_step(wave, x, t, 0.5 * h, opts, depth + 1)?;
    controlled_step(wave, mid, t + 0.5 * h, 0.5 * h, opts, depth + 1)
}

/// Integrates `dx/dt = v(x, t)` with RK4 from `t_span.0` to `t_span.1`.
pub fn integrate_trajectory(
    wave: &AnalyticTwoSlitWave,
    x0: f64,
    t_span: (f64, f64),
    opts: &TrajectoryOptions,
) -> Result<Trajectory, BohmError> {
    let (t0, t1) = t_span;
    if !(opts.dt > 0.0) || !(t1 > t0) || !(t0 >= 0.0) {
        return Err(BohmError::InvalidTimeSpan { dt: opts.dt, t0, t1 });
    }
    let steps = ((t1 - t0) / opts.dt - 1e-9).ceil() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    times.push(t0);
    positions.push(x0);
    guided_velocity(wave, x0, t0)?;
    let mut x = x0;
    for k in 0..steps {
        let t = t0 + k as f64 * opts.dt;
        let t_next = if k + 1 == steps {
            t1
        } else {
            t0 + (k + 1) as f64 * opts.dt
        };
        x = controlled_step(wave, x, t, t_next - t, opts, 0)?;
        times.push(t_next);
        positions.push(x);
    }
    Ok(Trajectory { times, positions, x0 })
}

/// Draws `n` initial positions from `|psi(x, t)|^2` by inverse-CDF sampling
/// on a fine grid; returned in ascending order.
pub fn sample_initial_positions(wave: &AnalyticTwoSlitWave, t: f64, n: usize, seed: u64) -> Vec<f64> {
    const CELLS: usize = 1 << 16;
    let (lo, hi) = wave.support(t, 8.0);
    let dx = (hi - lo) / CELLS as f64;
    let mut cdf = Vec::with_capacity(CELLS + 1);
    cdf.push(0.0);
    let mut acc = 0.0;
    let mut prev = wave.density(lo, t);
    for i in 1..=CELLS {
        let cur = wave.density(lo + i as f64 * dx, t);
        acc += 0.5 * (prev + cur) * dx;
        cdf.push(acc);
        prev = cur;
    }
    let mut rng = batch_rng(seed, 0);
    let mut xs: Vec<f64> = (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            let j = cdf.partition_point(|&c| c <= u).clamp(1, CELLS);
            let (c0, c1) = (cdf[j - 1], cdf[j]);
            let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
            lo + (j as f64 - 1.0 + frac) * dx
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Trajectories launched from `|psi|^2`-distributed positions, ordered by
/// starting position. Particles that hit a node are counted in `aborted`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEnsemble {
    pub trajectories: Vec<Trajectory>,
    pub aborted: Vec<f64>,
}

pub fn run_ensemble(
    wave: &AnalyticTwoSlitWave,
    particles: usize,
    seed: u64,
    t_span: (f64, f64),
    opts: &TrajectoryOptions,
) -> Result<TrajectoryEnsemble, BohmError> {
    wave.validate()?;
    let starts = sample_initial_positions(wave, t_span.0, particles, seed);
    let results: Vec<(f64, Result<Trajectory, BohmError>)> = starts
        .par_iter()
        .map(|&x0| (x0, integrate_trajectory(wave, x0, t_span, opts)))
        .collect();
    let mut trajectories = Vec::with_capacity(particles);
    let mut aborted = Vec::new();
    for (x0, r) in results {
        match r {
            Ok(tr) => trajectories.push(tr),
            Err(BohmError::NodeProximity { .. }) => aborted.push(x0),
            Err(e) => return Err(e),
        }
    }
    Ok(TrajectoryEnsemble { trajectories, aborted })
}

/// Outcome of an order-preservation check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub ordered: bool,
    /// `(time index, i)` where trajectory `i` first passes trajectory `i + 1`.
    pub first_violation: Option<(usize, usize)>,
}

/// Checks that trajectories sorted by starting position stay sorted at every
/// time step.
pub fn non_crossing_check(trajectories: &[Trajectory]) -> Result<CrossingReport, BohmError> {
    let Some(first) = trajectories.first() else {
        return Ok(CrossingReport {
            ordered: true,
            first_violation: None,
        });
    };
    if trajectories.iter().any(|t| t.times != first.times) {
        return Err(BohmError::TimeGridMismatch);
    }
    for k in 0..first.times.len() {
        for (i, pair) in trajectories.windows(2).enumerate() {
            if pair[0].positions[k] > pair[1].positions[k] {
                return Ok(CrossingReport {
                    ordered: false,
                    first_violation: Some((k, i)),
                });
            }
        }
    }
    Ok(CrossingReport {
        ordered: true,
        first_violation: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Pearson chi-square of `positions` against `|psi(., t)|^2` over `bins`
/// equal bins spanning the wave's support. Tail mass goes to the edge bins;
/// neighbouring bins are merged until every expected count is at least 5.
pub fn equivariance_chi2(
    wave: &AnalyticTwoSlitWave,
    positions: &[f64],
    t: f64,
    bins: usize,
) -> Result<ChiSquareTest, BohmError> {
    if bins < 2 || positions.is_empty() {
        return Err(BohmError::DegenerateHistogram);
    }
    let (lo, hi) = wave.support(t, 6.0);
    let width = (hi - lo) / bins as f64;
    let n = positions.len() as f64;
    let mut expected: Vec<f64> = (0..bins)
        .map(|b| {
            let a = lo + b as f64 * width;
            simpson(|x| wave.density(x, t), a, a + width, 64)
        })
        .collect();
    let inside: f64 = expected.iter().sum();
    let tail = (1.0 - inside).max(0.0) / 2.0;
    expected[0] += tail;
    expected[bins - 1] += tail;
    let mut observed = vec![0.0; bins];
    for &x in positions {
        let b = (((x - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        observed[b] += 1.0;
    }

    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (e, o) in expected.iter().zip(&observed) {
        acc.0 += e * n;
        acc.1 += o;
        if acc.0 >= 5.0 {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => merged.push(acc),
        }
    }
    if merged.len() < 2 {
        return Err(BohmError::DegenerateHistogram);
    }
    let statistic: f64 = merged.iter().map(|(e, o)| (o - e).powi(2) / e).sum();
    let dof = merged.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("dof >= 1");
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
    })
}

/// `R`, `S`, `Q` and `v` sampled on a uniform grid at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub q: Vec<Option<f64>>,
    pub v: Vec<f64>,
}

pub fn field_snapshot(wave: &AnalyticTwoSlitWave, t: f64, lo: f64, hi: f64, n: usize) -> FieldSnapshot {
    let dx = (hi - lo) / (n.max(2) - 1) as f64;
    let x: Vec<f64> = (0..n).map(|i| lo + i as f64 * dx).collect();
    let psi: Vec<Complex64> = x.iter().map(|&xi| evaluate_wave(wave, xi, t)).collect();
    let RSFields { r, s, .. } = rs_decompose(&psi, wave.hbar);
    let q = quantum_potential_with(&r, dx, wave.mass, wave.hbar);
    let v = velocity_field(&s, dx, wave.mass);
    FieldSnapshot { x, r, s, q, v }
}
