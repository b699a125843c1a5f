//! Reference values computed independently of the FFT pipeline.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, intervals: usize) -> Complex64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += f(a + i as f64 * h) * w;
    }
    sum * (h / 3.0)
}

/// Two-pinhole geometry for the quadrature oracle.
pub struct SlitGeometry {
    pub wavelength: f64,
    pub width: f64,
    pub distance: f64,
}

impl SlitGeometry {
    /// Fresnel diffraction integral of a unit slab centred at `center`,
    /// evaluated at screen coordinate `x`.
    pub fn amplitude(&self, center: f64, x: f64) -> Complex64 {
        let lz = self.wavelength * self.distance;
        let prefactor = Complex64::new(0.0, lz).sqrt().inv();
        let kernel = |xp: f64| Complex64::from_polar(1.0, PI * (x - xp) * (x - xp) / lz);
        prefactor * simpson(kernel, center - self.width / 2.0, center + self.width / 2.0, 2000)
    }

    pub fn intensity(&self, centers: &[f64], x: f64) -> f64 {
        centers
            .iter()
            .map(|&c| self.amplitude(c, x))
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Fraction of the transmitted flux that falls on wires of width `wire`
    /// centred at `wires`.
    pub fn blocked_fraction(&self, centers: &[f64], wires: &[f64], wire: f64) -> f64 {
        let on_wires: f64 = wires
            .iter()
            .map(|&w| {
                simpson(
                    |x| Complex64::new(self.intensity(centers, x), 0.0),
                    w - wire / 2.0,
                    w + wire / 2.0,
                    200,
                )
                .re
            })
            .sum();
        on_wires / (self.width * centers.len() as f64)
    }
}
