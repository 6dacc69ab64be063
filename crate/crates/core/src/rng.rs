//! Counter-based random streams. Every Monte Carlo trial draws from its own
//! ChaCha stream keyed by (master seed, point, trial), so results do not depend
//! on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for `trial` of sweep point `point` under `master`.
pub fn trial_rng(master: u64, point: u64, trial: u64) -> TrialRng {
    let mut seed = [0u8; 32];
    let mut s = splitmix64(master) ^ splitmix64(point.wrapping_add(0x632B_E59B_D9B4_E019));
    for chunk in seed.chunks_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(trial);
    rng
}
