//! Seeding and stream layout.
//!
//! Every random quantity comes from `ChaCha8Rng` (rand_chacha), which is
//! specified bit-for-bit and therefore portable across platforms. Trial `t`
//! of a batch with master seed `m` uses seed `m ^ splitmix64(t)`. Inside a
//! trial, stream 0 feeds the `h` draws and stream 1 feeds edge selection, so
//! swapping the selection rule never shifts the `h` sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 output function applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    master_seed ^ splitmix64(trial)
}

/// The two independent streams used by one solver run.
pub struct TrialRng {
    pub h: Rng,
    pub selection: Rng,
}

impl TrialRng {
    pub fn new(seed: u64) -> Self {
        let mut h = Rng::seed_from_u64(seed);
        h.set_stream(0);
        let mut selection = Rng::seed_from_u64(seed);
        selection.set_stream(1);
        TrialRng { h, selection }
    }
}

/// Generator for instance synthesis.
pub fn generator(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
