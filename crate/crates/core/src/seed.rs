//! Seed fan-out. Every random stream of a run is a pure function of the
//! master seed and the realization index, so results do not depend on sweep
//! order or on how realizations are spread over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Scenario = 1,
    Repair = 2,
    Optimizer = 3,
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn realization_seed(master: u64, realization: u64) -> u64 {
    mix(mix(master) ^ realization.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn stream_rng(realization_seed: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(
        realization_seed ^ (stream as u64).wrapping_mul(0xA24B_AED4_963E_E407)
    ))
}
