//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! `u64` seed and a stream id, so components that share a seed (say a bare
//! NeuralBandit1 and the single model of a one-model committee) draw exactly
//! the same numbers while unrelated consumers never collide.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Stream id for weight initialization of arm `k`'s network.
pub fn weights_stream(arm: usize) -> u64 {
    0x1000 + arm as u64
}

/// Stream used to sample the played arm.
pub const ACTION_STREAM: u64 = 1;
/// Stream used by committees to sample models.
pub const MODEL_STREAM: u64 = 2;
/// Stream used by the evaluator for stream offsets and oracle draws.
pub const RUN_STREAM: u64 = 3;
/// Stream used to shuffle a dataset at load time.
pub const SHUFFLE_STREAM: u64 = 4;
/// Stream feeding synthetic generators.
pub const SYNTHETIC_STREAM: u64 = 5;
/// Stream used by the emulated fixed-accuracy oracle.
pub const ORACLE_STREAM: u64 = 6;

pub fn rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a base seed with an index (SplitMix64 finalizer), for seeds of
/// sibling components that must not overlap.
pub fn derive(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples an index from a discrete distribution by inverse CDF.
///
/// Falls back to the last index with positive mass when rounding leaves the
/// cumulative sum just short of the uniform draw.
pub fn sample_index<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
