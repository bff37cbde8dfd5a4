//! Seed derivation helpers. All randomness in the crate flows from a `u64`
//! seed through ChaCha8 streams so that runs are reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed from `seed` and a label.
pub fn child(seed: u64, label: u64) -> u64 {
    mix(seed ^ mix(label.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
