//! Seeded random instance sources.
//!
//! The pseudorandom source is ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded
//! from a 64-bit value; it is portable and its stream is stable across
//! releases, which keeps experiment output reproducible. Per-trial seeds are
//! derived from the base seed by XOR with a SplitMix64 hash of the
//! (cell, trial) pair.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::math::{ln, powf};
use crate::{Error, Result};

/// Maximum rejection attempts per item before giving up. The rejection
/// probability per draw is e^-1 for the shape-3 Weibull, so hitting this
/// means the generator is broken, not unlucky.
const MAX_ATTEMPTS: u32 = 1000;

/// Random size distributions used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Weibull with the given shape and scale 1, draws above 1 rejected and
    /// resampled so all sizes stay in `(0, 1]`.
    Weibull { shape: f64 },
    /// Continuous uniform on `(0, 1]`.
    Uniform,
}

/// What to sample: a distribution, a count, and a seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub kind: Distribution,
    pub n: usize,
    pub seed: u64,
}

/// Draws an instance; identical specs give identical instances.
pub fn sample(spec: &GeneratorSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut items = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        items.push(draw(&mut rng, spec.kind)?);
    }
    let source = match spec.kind {
        Distribution::Weibull { shape } => {
            format!("weibull(shape={shape}) n={} seed={}", spec.n, spec.seed)
        }
        Distribution::Uniform => format!("uniform n={} seed={}", spec.n, spec.seed),
    };
    Ok(Instance::new(items)?.with_source(source))
}

fn draw(rng: &mut ChaCha8Rng, kind: Distribution) -> Result<f64> {
    for _ in 0..MAX_ATTEMPTS {
        // gen::<f64>() is [0, 1); flip to (0, 1] so sizes are never zero.
        let u = 1.0 - rng.gen::<f64>();
        let x = match kind {
            Distribution::Uniform => u,
            Distribution::Weibull { shape } => raw_weibull(u, shape),
        };
        if x > 0.0 && x <= 1.0 {
            return Ok(x);
        }
    }
    Err(Error::SamplerStuck)
}

/// Inverse-CDF transform for the scale-1 Weibull: `(-ln u)^(1/shape)`.
pub fn raw_weibull(u: f64, shape: f64) -> f64 {
    powf(-ln(u), 1.0 / shape)
}

/// SplitMix64 finalizer; decorrelates nearby cell/trial indices.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed from (base seed, cell index, trial index); independent of
/// any execution schedule.
pub fn derive_seed(base: u64, cell: u64, trial: u64) -> u64 {
    base ^ splitmix64(cell.wrapping_mul(0x0000_0100_0000_01B3).wrapping_add(trial))
}

/// Seeded Fisher-Yates shuffle (e.g. for benchmark files read in file order).
pub fn shuffle(items: &mut [f64], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}
