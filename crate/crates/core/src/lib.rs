//! Desk-scale simulations of single-photon interferometry and the formal
//! machinery around wave-particle duality.
//!
//! The crate is organised by physics subsystem:
//!
//! * [`fock`] - two-mode Fock-space beam splitters, detection amplitudes and
//!   coincidence statistics, plus a frustrated-total-internal-reflection model
//!   for a two-prism splitter.
//! * [`wave`] - 1-D scalar wave optics: apertures, angular-spectrum
//!   propagation, wire grids, thin lenses, fringe extrema and photon-spot
//!   sampling.
//! * [`duality`] - visibility, predictability, trace distinguishability and
//!   Shannon path information.
//! * [`bohm`] - polar decomposition of the wavefunction, quantum potential,
//!   guidance velocities and particle trajectories for a two-slit wave.
//! * [`measurement`] - impulsive pointer measurements, branch separation,
//!   reversal and weak values.
//! * [`experiments`] - scenario runners that wire the above together and
//!   produce CSV/JSON artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bohm;
pub mod duality;
pub mod experiments;
pub mod fock;
pub mod measurement;
pub mod sampling;
pub mod wave;

pub use num_complex::Complex64;
