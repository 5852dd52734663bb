//! Seeded Brownian increments.
//!
//! Increments are `sqrt(dt) * Z` with `Z` drawn from `rand_distr::StandardNormal`
//! (ziggurat sampler) fed by a `ChaCha8Rng` seeded with `seed_from_u64`.
//! ChaCha is a counter-based stream cipher, so the sequence for a given seed
//! is fixed across platforms and runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::SimError;

/// Endless source of `Normal(0, dt)` draws.
#[derive(Debug, Clone)]
pub struct BrownianSource {
    rng: ChaCha8Rng,
    scale: f64,
}

impl BrownianSource {
    pub fn new(seed: u64, dt: f64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            scale: dt.sqrt(),
        }
    }

    #[inline]
    pub fn next_increment(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        self.scale * z
    }
}

impl Iterator for BrownianSource {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(self.next_increment())
    }
}

/// A materialized run of Brownian increments.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseStream {
    pub seed: u64,
    pub dt: f64,
    pub increments: Vec<f64>,
}

impl NoiseStream {
    /// Increments of the same Brownian path over steps `factor` times longer.
    pub fn coarsen(&self, factor: usize) -> NoiseStream {
        let factor = factor.max(1);
        NoiseStream {
            seed: self.seed,
            dt: self.dt * factor as f64,
            increments: self
                .increments
                .chunks(factor)
                .filter(|c| c.len() == factor)
                .map(|c| c.iter().sum())
                .collect(),
        }
    }
}

/// `n` independent `Normal(0, dt)` draws, reproducible per `(seed, n, dt)`.
pub fn brownian_increments(seed: u64, n: usize, dt: f64) -> Result<NoiseStream, SimError> {
    if n == 0 {
        return Err(SimError::InvalidConfig("need at least one increment".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    Ok(NoiseStream {
        seed,
        dt,
        increments: BrownianSource::new(seed, dt).take(n).collect(),
    })
}

/// Per-path seed derived from a master seed.
///
/// `splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)`, i.e. the
/// `index + 1`-th output of a SplitMix64 generator started at `master`.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
