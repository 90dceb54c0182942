//! Seed derivation.
//!
//! Every random stream in a run is a ChaCha8 generator keyed by a sub-seed
//! derived from the scenario seed and a path of tags (frame index, role).
//! The derivation is a SplitMix64 chain, so sub-seeds are stable across
//! platforms and independent of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream roles within one Monte-Carlo frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Payload = 1,
    Pilots = 2,
    Fading = 3,
    Impulse = 4,
    Awgn = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `tags` into `base`, one SplitMix64 round per tag.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(base), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Sub-seed for `stream` in Monte-Carlo frame `frame`.
pub fn frame_seed(base: u64, frame: u64, stream: Stream) -> u64 {
    derive_seed(base, &[frame, stream as u64])
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_tag_sensitive() {
        assert_eq!(derive_seed(7, &[1, 2]), derive_seed(7, &[1, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
        assert_ne!(frame_seed(7, 0, Stream::Fading), frame_seed(7, 1, Stream::Fading));
        assert_ne!(frame_seed(7, 0, Stream::Fading), frame_seed(7, 0, Stream::Awgn));
    }
}
