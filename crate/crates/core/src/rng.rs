//! Counter-derived random substreams.
//!
//! Every trial draws from its own generator keyed by
//! `(seed, experiment, point, trial)`, so results do not depend on how
//! trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A position in the stream tree. Cheap to copy; derive children with
/// [`child`](Self::child) and generators with [`rng`](Self::rng).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        Self(splitmix64(seed))
    }

    pub fn child(self, id: u64) -> Self {
        Self(splitmix64(
            self.0 ^ splitmix64(id.wrapping_add(0x632b_e59b_d9b4_e019)),
        ))
    }

    pub fn rng(self) -> TrialRng {
        let mut seed = [0u8; 32];
        let mut s = self.0;
        for chunk in seed.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }

    pub fn trial_rng(self, trial: u64) -> TrialRng {
        self.child(trial).rng()
    }
}

/// Stable id for a string label (experiment names and the like).
pub fn label_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    })
}
