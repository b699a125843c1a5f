use rand::Rng;

use super::WaveError;
use crate::sampling::{collect_batched, DiscreteSampler};

/// Draws photon detection positions with probability proportional to the
/// intensity in each grid cell; positions are uniform within the cell.
pub fn sample_photon_positions(
    profile: &[f64],
    dx: f64,
    origin: f64,
    shots: usize,
    seed: u64,
) -> Result<Vec<f64>, WaveError> {
    if profile.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(WaveError::InvalidProfile);
    }
    let sampler = DiscreteSampler::new(profile).ok_or(WaveError::ZeroFlux)?;
    Ok(collect_batched(shots, seed, |rng, n| {
        (0..n)
            .map(|_| {
                let i = sampler.sample(rng);
                origin + (i as f64 + rng.random::<f64>() - 0.5) * dx
            })
            .collect()
    }))
}
