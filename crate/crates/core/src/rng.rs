//! Seed derivation. Every random stream in the crate is a ChaCha8 stream
//! derived from an experiment seed, so results never depend on OS entropy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Purposes get their own stream so that adding draws in one place does not
/// shift another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Scene = 1,
    ViewCandidates = 2,
    PushSampling = 3,
    PushVig = 4,
    RandomView = 5,
    SensorNoise = 6,
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for `(seed, step, purpose)`.
pub fn derive(seed: u64, step: u64, stream: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(step.wrapping_add(1))));
    rng.set_stream(stream as u64);
    rng
}

/// Sub-stream for an indexed item within a step (e.g. one push candidate).
pub fn derive_indexed(seed: u64, step: u64, stream: Stream, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(
        seed ^ splitmix(step.wrapping_add(1)) ^ splitmix(index.wrapping_add(0x9e37)),
    ));
    rng.set_stream(stream as u64);
    rng
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
