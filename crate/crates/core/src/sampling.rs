//! Seeded Monte Carlo helpers.
//!
//! Shots are drawn in fixed-size batches; batch `k` uses the generator seeded
//! with `seed + k`. Batches run in parallel and merge by summation or
//! concatenation, so results depend only on `(shots, seed)` and never on the
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Shots per independently seeded batch.
pub const BATCH_SIZE: usize = 1 << 16;

pub fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(batch as u64))
}

/// Splits `shots` into `(batch index, batch size)` pairs.
pub fn batches(shots: usize) -> Vec<(usize, usize)> {
    let full = shots / BATCH_SIZE;
    let rest = shots % BATCH_SIZE;
    let mut out: Vec<(usize, usize)> = (0..full).map(|k| (k, BATCH_SIZE)).collect();
    if rest > 0 {
        out.push((full, rest));
    }
    out
}

/// Runs `draw` over every batch in parallel and concatenates the results in
/// batch order.
pub fn collect_batched<T, F>(shots: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Vec<T> + Sync,
{
    batches(shots)
        .into_par_iter()
        .map(|(k, n)| draw(&mut batch_rng(seed, k), n))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Inverse-CDF sampler over a nonnegative weight table.
#[derive(Debug, Clone)]
pub struct DiscreteSampler {
    cumulative: Vec<f64>,
}

impl DiscreteSampler {
    /// Returns `None` when the weights carry no mass or contain a negative or
    /// non-finite entry.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(weights.len());
        for &w in weights {
            if !(w >= 0.0) || !w.is_finite() {
                return None;
            }
            acc += w;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return None;
        }
        Some(Self { cumulative })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("non-empty by construction")
    }

    /// Index `i` is returned with probability `w_i / total`. Zero-weight
    /// entries are never returned.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total();
        // First index whose cumulative weight strictly exceeds u.
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches_cover_all_shots() {
        let b = batches(BATCH_SIZE * 2 + 7);
        assert_eq!(b.len(), 3);
        assert_eq!(b.iter().map(|&(_, n)| n).sum::<usize>(), BATCH_SIZE * 2 + 7);
        assert!(batches(0).is_empty());
    }

    #[test]
    fn zero_weights_never_drawn() {
        let s = DiscreteSampler::new(&[0.0, 1.0, 0.0, 3.0, 0.0]).unwrap();
        let mut rng = batch_rng(1, 0);
        for _ in 0..10_000 {
            let i = s.sample(&mut rng);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn rejects_degenerate_weights() {
        assert!(DiscreteSampler::new(&[]).is_none());
        assert!(DiscreteSampler::new(&[0.0, 0.0]).is_none());
        assert!(DiscreteSampler::new(&[1.0, -0.1]).is_none());
        assert!(DiscreteSampler::new(&[f64::NAN]).is_none());
    }
}
